/**
 * Hash-verified alert exports: download the gateway's export document,
 * surface the 64-hex digest for manual recording, and re-verify uploaded
 * documents, yielding the valid/invalid badge.
 */

import { AlertExportDoc, GatewayClient } from "./api.js";

export interface ExportResult {
  fileName: string;
  json: string;
  hash: string;
  emptyEvidence: boolean;
}

export type VerifyBadge = { state: "valid" } | { state: "invalid"; reason: string };

export async function exportWithHash(
  client: GatewayClient,
  alertId: number,
  hashVersion = 1,
): Promise<ExportResult> {
  const doc = await client.exportAlert(alertId, hashVersion);
  return {
    fileName: `alert-${alertId}.alert.json`,
    json: JSON.stringify(doc, null, 1),
    hash: doc.hash,
    emptyEvidence: doc.alert["image_ref"] === null || doc.alert["image_ref"] === undefined,
  };
}

export async function verifyUpload(
  client: GatewayClient,
  text: string,
): Promise<VerifyBadge> {
  let doc: AlertExportDoc;
  try {
    doc = JSON.parse(text) as AlertExportDoc;
  } catch {
    return { state: "invalid", reason: "not a JSON document" };
  }
  try {
    const result = await client.verifyExport(doc);
    return result.valid
      ? { state: "valid" }
      : { state: "invalid", reason: result.reason || "hash mismatch" };
  } catch (err) {
    return { state: "invalid", reason: err instanceof Error ? err.message : String(err) };
  }
}
