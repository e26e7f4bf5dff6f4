import { describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { exportWithHash, verifyUpload } from "../src/exporter.js";
import { MockGateway } from "./mock_gateway.js";

function client(mock: MockGateway) {
  const c = new GatewayClient("http://mock", mock.fetch);
  c.token = "tok-mock";
  return c;
}

describe("export with hash", () => {
  it("exposes the 64-hex digest and a download name", async () => {
    const mock = new MockGateway();
    const alert = mock.addAlert({ pc_id: "pc-7", reason: "dns", score: 2, image_ref: 3 });
    const result = await exportWithHash(client(mock), alert.id);
    expect(result.fileName).toBe(`alert-${alert.id}.alert.json`);
    expect(result.hash).toMatch(/^[0-9a-f]{64}$/);
    expect(result.emptyEvidence).toBe(false);
    expect(JSON.parse(result.json).alert.pc_id).toBe("pc-7");
  });

  it("flags empty-evidence alerts", async () => {
    const mock = new MockGateway();
    const alert = mock.addAlert({ pc_id: "pc-8", image_ref: null });
    const result = await exportWithHash(client(mock), alert.id);
    expect(result.emptyEvidence).toBe(true);
  });
});

describe("verify upload", () => {
  it("round trip shows the valid badge", async () => {
    const mock = new MockGateway();
    const alert = mock.addAlert({ pc_id: "pc-9", score: 1 });
    const exported = await exportWithHash(client(mock), alert.id);
    const badge = await verifyUpload(client(mock), exported.json);
    expect(badge.state).toBe("valid");
  });

  it("tampered documents show the invalid badge", async () => {
    const mock = new MockGateway();
    const alert = mock.addAlert({ pc_id: "pc-9", score: 1 });
    const exported = await exportWithHash(client(mock), alert.id);
    const tampered = exported.json.replace("pc-9", "pc-X");
    const badge = await verifyUpload(client(mock), tampered);
    expect(badge.state).toBe("invalid");
    if (badge.state === "invalid") expect(badge.reason).toMatch(/mismatch/);
  });

  it("rejects non-JSON uploads locally", async () => {
    const mock = new MockGateway();
    const badge = await verifyUpload(client(mock), "{not json");
    expect(badge.state).toBe("invalid");
  });
});
