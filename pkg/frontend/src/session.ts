/**
 * Session state: bearer token, role, expiry. Expired sessions fire the
 * redirect hook; role gates which navigation entries render.
 */

import { ApiError, GatewayClient, Role } from "./api.js";

export interface SessionState {
  token: string;
  role: Role;
  email: string;
  expiresAt: number;
}

export type LoginResult =
  | { ok: true; session: SessionState }
  | { ok: false; error: string; rateLimited: boolean };

const SESSION_TTL_MS = 55 * 60 * 1000; // refresh slightly before the gateway's token TTL

export class SessionStore {
  state: SessionState | null = null;
  onExpired: (() => void) | null = null;

  constructor(
    private client: GatewayClient,
    private now: () => number = () => Date.now(),
  ) {}

  async login(email: string, password: string): Promise<LoginResult> {
    try {
      const body = await this.client.login(email, password);
      this.client.token = body.token;
      this.state = {
        token: body.token,
        role: body.role,
        email: body.email,
        expiresAt: this.now() + SESSION_TTL_MS,
      };
      return { ok: true, session: this.state };
    } catch (err) {
      this.client.token = null;
      this.state = null;
      if (err instanceof ApiError) {
        if (err.status === 429) {
          return {
            ok: false,
            rateLimited: true,
            error: "Too many failed attempts; wait a bit before retrying.",
          };
        }
        return { ok: false, rateLimited: false, error: "Invalid email or password." };
      }
      return { ok: false, rateLimited: false, error: "Gateway unreachable." };
    }
  }

  logout(): void {
    this.state = null;
    this.client.token = null;
  }

  /** Current session, or null after firing the expiry redirect. */
  active(): SessionState | null {
    if (this.state && this.now() >= this.state.expiresAt) {
      this.logout();
      this.onExpired?.();
      return null;
    }
    return this.state;
  }

  isAdmin(): boolean {
    return this.active()?.role === "admin";
  }

  /** Navigation entries visible for the current role. */
  navigation(): string[] {
    const session = this.active();
    if (!session) return [];
    const items = ["alerts", "exports"];
    if (session.role === "admin") items.push("blacklists", "users");
    return items;
  }

  /** Shared 401 handler: drop the session and redirect to login. */
  handleUnauthorized(err: unknown): boolean {
    if (err instanceof ApiError && err.status === 401) {
      this.logout();
      this.onExpired?.();
      return true;
    }
    return false;
  }
}
