/**
 * Blacklist editor with optimistic updates.
 *
 * Mutations apply to the local list immediately and fire exactly one
 * gateway call; a 4xx rolls the list back to the pre-mutation snapshot
 * and surfaces the gateway's violation code inline. The policy version
 * from each acknowledged mutation is shown so an administrator can
 * confirm propagation to agents within their sync interval.
 */

import { ApiError, BlacklistCategory, BlacklistEntry, GatewayClient } from "./api.js";

export interface EditorNotice {
  kind: "info" | "error";
  text: string;
}

export class BlacklistEditor {
  entries: BlacklistEntry[] = [];
  policyVersion = 0;
  notice: EditorNotice | null = null;
  onChange: (() => void) | null = null;

  constructor(
    private client: GatewayClient,
    readonly category: BlacklistCategory,
  ) {}

  async load(): Promise<void> {
    this.entries = await this.client.listBlacklist(this.category);
    this.policyVersion = (await this.client.policyVersion()).version;
    this.notice = null;
    this.onChange?.();
  }

  private describe(body: Record<string, unknown>): string {
    if (this.category === "malicious-port") {
      return body.banner ? `${body.port}:${body.banner}` : String(body.port);
    }
    return String(body.value ?? "");
  }

  async add(body: Record<string, unknown>): Promise<boolean> {
    const snapshot = [...this.entries];
    const optimistic: BlacklistEntry = { id: -1, ...body } as BlacklistEntry;
    this.entries = [...this.entries, optimistic];
    this.notice = null;
    this.onChange?.();
    try {
      const ack = await this.client.addBlacklistEntry(this.category, body);
      if (!ack.created) {
        // duplicate: the list had it all along; drop the optimistic row
        this.entries = snapshot;
        this.notice = {
          kind: "info",
          text: `"${this.describe(body)}" is already listed (deduplicated).`,
        };
      } else {
        this.entries = this.entries.map((e) => (e === optimistic ? { ...e, id: ack.id } : e));
        this.policyVersion = ack.version;
        this.notice = {
          kind: "info",
          text: `Added; policy version is now ${ack.version}.`,
        };
      }
      this.onChange?.();
      return ack.created;
    } catch (err) {
      this.entries = snapshot; // rollback
      this.notice = {
        kind: "error",
        text:
          err instanceof ApiError
            ? `Rejected by the gateway: ${String(err.body.error ?? err.status)}`
            : "Gateway unreachable; change rolled back.",
      };
      this.onChange?.();
      return false;
    }
  }

  async remove(id: number): Promise<boolean> {
    const snapshot = [...this.entries];
    this.entries = this.entries.filter((e) => e.id !== id);
    this.notice = null;
    this.onChange?.();
    try {
      const ack = await this.client.deleteBlacklistEntry(this.category, id);
      this.policyVersion = ack.version;
      this.notice = { kind: "info", text: `Removed; policy version is now ${ack.version}.` };
      this.onChange?.();
      return true;
    } catch (err) {
      this.entries = snapshot;
      this.notice = {
        kind: "error",
        text:
          err instanceof ApiError
            ? `Delete rejected: ${String(err.body.error ?? err.body.detail ?? err.status)}`
            : "Gateway unreachable; change rolled back.",
      };
      this.onChange?.();
      return false;
    }
  }
}
