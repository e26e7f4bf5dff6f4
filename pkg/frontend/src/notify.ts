/**
 * Notification badge for alerts that arrived while the operator is
 * looking elsewhere. Queue is ordered by severity score, highest first,
 * so the most critical alert is always the one surfaced.
 */

import { AlertRecord } from "./api.js";

export class NotificationCenter {
  private queue: AlertRecord[] = [];
  onChange: ((badge: number) => void) | null = null;

  get badge(): number {
    return this.queue.length;
  }

  push(alert: AlertRecord): void {
    this.queue.push(alert);
    this.queue.sort((a, b) => (b.score ?? 0) - (a.score ?? 0));
    this.onChange?.(this.badge);
  }

  /** Highest-severity pending alert without consuming it. */
  peek(): AlertRecord | null {
    return this.queue[0] ?? null;
  }

  acknowledge(): AlertRecord | null {
    const head = this.queue.shift() ?? null;
    this.onChange?.(this.badge);
    return head;
  }

  clear(): void {
    this.queue = [];
    this.onChange?.(0);
  }
}
