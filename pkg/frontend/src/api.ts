/**
 * Typed gateway client. All UI modules go through this one surface so a
 * mocked fetch covers every network interaction in tests.
 */

export type Role = "admin" | "user";

export interface AlertRecord {
  id: number;
  pc_id: string;
  mac?: string;
  reason?: string;
  score?: number;
  indicators?: Record<string, number>;
  register_date?: string | number;
  image_ref?: number | null;
  owner?: string;
  created_at?: number;
}

export interface AlertPage {
  items: AlertRecord[];
  total: number;
  page: number;
  size: number;
}

export interface BlacklistEntry {
  id: number;
  value?: string;
  port?: number;
  banner?: string;
}

export interface AlertExportDoc {
  alert: Record<string, unknown>;
  hash: string;
  hashed_fields: string;
  hash_version: number;
}

export type BlacklistCategory =
  | "malicious-website"
  | "bad-language"
  | "malicious-process"
  | "malicious-port";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: Record<string, unknown>,
  ) {
    super(`gateway responded ${status}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  token: string | null = null;

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.token) headers.authorization = `Bearer ${this.token}`;
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    const parsed = text ? JSON.parse(text) : {};
    if (!resp.ok) throw new ApiError(resp.status, parsed);
    return parsed as T;
  }

  login(email: string, password: string) {
    return this.request<{ token: string; role: Role; email: string }>("POST", "/api/login", {
      email,
      password,
    });
  }

  register(email: string, password: string, role: Role = "user") {
    return this.request<{ id: number }>("POST", "/api/user", { email, password, role });
  }

  listAlerts(query: string) {
    const q = query ? `?${query}` : "";
    return this.request<AlertPage>("GET", `/api/alert${q}`);
  }

  getAlert(id: number) {
    return this.request<AlertRecord>("GET", `/api/alert/${id}`);
  }

  deleteAlert(id: number) {
    return this.request<{ deleted: number }>("DELETE", `/api/alert/${id}`);
  }

  listBlacklist(category: BlacklistCategory) {
    return this.request<BlacklistEntry[]>("GET", `/api/${category}?detail=full`);
  }

  addBlacklistEntry(category: BlacklistCategory, body: Record<string, unknown>) {
    return this.request<{ id: number; created: boolean; version: number }>(
      "POST",
      `/api/${category}`,
      body,
    );
  }

  deleteBlacklistEntry(category: BlacklistCategory, id: number) {
    return this.request<{ deleted: number; version: number }>(
      "DELETE",
      `/api/${category}/${id}`,
    );
  }

  policyVersion() {
    return this.request<{ version: number }>("GET", "/api/policy-version");
  }

  exportAlert(id: number, hashVersion = 1) {
    return this.request<AlertExportDoc>("GET", `/api/alert/${id}/export?hash_version=${hashVersion}`);
  }

  verifyExport(doc: AlertExportDoc) {
    return this.request<{ valid: boolean; reason: string }>("POST", "/api/alert/verify", doc);
  }

  imageContent(id: number) {
    return this.request<{ id: number; size: number; content: string }>("GET", `/api/image/${id}`);
  }
}
