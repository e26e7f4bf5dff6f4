/**
 * Alert triage list: pagination, filters, severity-descending default
 * order, URL-encoded view state, and a polling loop that raises the
 * notification badge for alerts that arrived since the last look.
 *
 * Stale in-flight responses are discarded by sequence number so a slow
 * page-1 response can never clobber a newer page-2 view.
 */

import { AlertRecord, ApiError, GatewayClient } from "./api.js";
import { NotificationCenter } from "./notify.js";

export interface TriageFilters {
  mac?: string;
  dateFrom?: string;
  dateTo?: string;
  type?: string;
  minScore?: number;
}

export interface TriageViewState {
  page: number;
  size: number;
  sort: string;
  filters: TriageFilters;
}

export const DEFAULT_VIEW: TriageViewState = {
  page: 0,
  size: 10,
  sort: "-score", // severity-descending default
  filters: {},
};

export function viewToQuery(view: TriageViewState): string {
  const params = new URLSearchParams();
  params.set("page", String(view.page));
  params.set("size", String(view.size));
  params.set("sort", view.sort);
  if (view.filters.mac) params.set("mac", view.filters.mac);
  if (view.filters.dateFrom) params.set("date_from", view.filters.dateFrom);
  if (view.filters.dateTo) params.set("date_to", view.filters.dateTo);
  if (view.filters.type) params.set("type", view.filters.type);
  if (view.filters.minScore !== undefined) params.set("min_score", String(view.filters.minScore));
  return params.toString();
}

export function queryToView(query: string): TriageViewState {
  const params = new URLSearchParams(query);
  const filters: TriageFilters = {};
  if (params.get("mac")) filters.mac = params.get("mac")!;
  if (params.get("date_from")) filters.dateFrom = params.get("date_from")!;
  if (params.get("date_to")) filters.dateTo = params.get("date_to")!;
  if (params.get("type")) filters.type = params.get("type")!;
  if (params.get("min_score") !== null) filters.minScore = Number(params.get("min_score"));
  return {
    page: Number(params.get("page") ?? DEFAULT_VIEW.page),
    size: Number(params.get("size") ?? DEFAULT_VIEW.size),
    sort: params.get("sort") ?? DEFAULT_VIEW.sort,
    filters,
  };
}

export class TriageStore {
  view: TriageViewState = { ...DEFAULT_VIEW, filters: {} };
  rows: AlertRecord[] = [];
  total = 0;
  loading = false;
  /** true when the screen shows data that failed to refresh */
  stale = false;
  retryBanner = false;
  lastError = "";
  onChange: (() => void) | null = null;
  onUnauthorized: ((err: unknown) => void) | null = null;

  private seq = 0;
  private maxSeenId = -1;
  private primed = false;

  constructor(
    private client: GatewayClient,
    private notifications: NotificationCenter = new NotificationCenter(),
  ) {}

  get badge(): NotificationCenter {
    return this.notifications;
  }

  queryString(): string {
    return viewToQuery(this.view);
  }

  applyQueryString(query: string): void {
    this.view = queryToView(query);
  }

  setFilters(filters: TriageFilters): void {
    this.view = { ...this.view, page: 0, filters: { ...filters } };
  }

  setPage(page: number): void {
    this.view = { ...this.view, page };
  }

  async refresh(): Promise<void> {
    const ticket = ++this.seq;
    this.loading = true;
    try {
      const page = await this.client.listAlerts(this.queryString());
      if (ticket !== this.seq) return; // a newer request superseded this one
      this.rows = page.items;
      this.total = page.total;
      this.stale = false;
      this.retryBanner = false;
      this.lastError = "";
      this.trackSeen(page.items);
      this.primed = true;
    } catch (err) {
      if (ticket !== this.seq) return;
      if (this.onUnauthorized && err instanceof ApiError && err.status === 401) {
        this.onUnauthorized(err);
        return;
      }
      this.stale = this.rows.length > 0;
      this.retryBanner = true;
      this.lastError = err instanceof Error ? err.message : String(err);
    } finally {
      if (ticket === this.seq) {
        this.loading = false;
        this.onChange?.();
      }
    }
  }

  /**
   * One polling step: look at the newest alerts and badge anything that
   * arrived since the last refresh or poll. Call on a 2 s timer.
   */
  async pollOnce(): Promise<void> {
    let page;
    try {
      page = await this.client.listAlerts("page=0&size=25&sort=-id");
    } catch (err) {
      if (this.onUnauthorized && err instanceof ApiError && err.status === 401) {
        this.onUnauthorized(err);
      }
      return; // polling failures are silent; refresh() owns the banner
    }
    if (!this.primed) {
      this.trackSeen(page.items);
      this.primed = true;
      return;
    }
    const fresh = page.items.filter((a) => a.id > this.maxSeenId);
    for (const alert of fresh) this.notifications.push(alert);
    this.trackSeen(page.items);
    if (fresh.length) this.onChange?.();
  }

  private trackSeen(items: AlertRecord[]): void {
    for (const alert of items) {
      if (alert.id > this.maxSeenId) this.maxSeenId = alert.id;
    }
  }
}
