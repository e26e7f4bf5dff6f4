/**
 * Browser wiring: renders the login screen, the triage table with live
 * badge, the blacklist panels, and the export/verify tools on top of the
 * framework-free stores. Everything testable lives in the sibling
 * modules; this file only touches the DOM.
 */

import { GatewayClient } from "./api.js";
import { BlacklistEditor } from "./blacklist.js";
import { exportWithHash, verifyUpload } from "./exporter.js";
import { NotificationCenter } from "./notify.js";
import { SessionStore } from "./session.js";
import { TriageStore } from "./triage.js";

const POLL_INTERVAL_MS = 2000;

const CATEGORIES = [
  "malicious-website",
  "bad-language",
  "malicious-process",
  "malicious-port",
] as const;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

export function startApp(root: HTMLElement, gatewayUrl: string): void {
  const client = new GatewayClient(gatewayUrl);
  const session = new SessionStore(client);
  const notifications = new NotificationCenter();
  const triage = new TriageStore(client, notifications);
  let pollTimer: number | null = null;

  session.onExpired = () => renderLogin("Session expired; sign in again.");
  triage.onUnauthorized = () => session.handleUnauthorized;

  function stopPolling() {
    if (pollTimer !== null) {
      clearInterval(pollTimer);
      pollTimer = null;
    }
  }

  function renderLogin(message = "") {
    stopPolling();
    root.replaceChildren();
    const email = el("input", { type: "email", placeholder: "email", value: "" });
    const password = el("input", { type: "password", placeholder: "password" });
    const error = el("p", { class: "error" }, message);
    const button = el("button", {}, "Sign in");
    button.addEventListener("click", async () => {
      const result = await session.login(email.value, password.value);
      if (result.ok) {
        renderShell();
      } else {
        error.textContent = result.error;
        if (result.rateLimited) error.classList.add("rate-limited");
      }
    });
    root.append(el("section", { class: "login" }, el("h1", {}, "sentry console"), email, password, button, error));
  }

  function renderShell() {
    root.replaceChildren();
    const badge = el("span", { class: "badge" }, "0");
    notifications.onChange = (n) => (badge.textContent = String(n));
    const nav = el("nav", {});
    const content = el("main", {});
    for (const item of session.navigation()) {
      const link = el("a", { href: `#${item}` }, item);
      link.addEventListener("click", () => renderSection(item, content));
      nav.append(link);
    }
    nav.append(el("span", {}, " alerts pending: "), badge);
    const logout = el("button", {}, "Sign out");
    logout.addEventListener("click", () => {
      session.logout();
      renderLogin();
    });
    root.append(el("header", {}, nav, logout), content);
    renderSection("alerts", content);
    pollTimer = setInterval(() => void triage.pollOnce(), POLL_INTERVAL_MS) as unknown as number;
  }

  function renderSection(name: string, content: HTMLElement) {
    if (name === "alerts") return renderTriage(content);
    if (name === "blacklists") return renderBlacklists(content);
    if (name === "exports") return renderExports(content);
    content.replaceChildren(el("p", {}, `${name}: not implemented in this build`));
  }

  function renderTriage(content: HTMLElement) {
    if (window.location.hash.includes("?")) {
      triage.applyQueryString(window.location.hash.split("?")[1]);
    }
    const table = el("table", { class: "alerts" });
    const status = el("p", {});
    const macFilter = el("input", { placeholder: "filter by MAC" });
    const minScore = el("input", { placeholder: "min severity", type: "number" });
    const apply = el("button", {}, "Apply filters");
    apply.addEventListener("click", () => {
      triage.setFilters({
        mac: macFilter.value || undefined,
        minScore: minScore.value ? Number(minScore.value) : undefined,
      });
      window.location.hash = `alerts?${triage.queryString()}`;
      void triage.refresh();
    });
    triage.onChange = () => {
      table.replaceChildren(
        el(
          "tr",
          {},
          ...["id", "endpoint", "mac", "reason", "severity", "evidence"].map((h) => el("th", {}, h)),
        ),
        ...triage.rows.map((a) =>
          el(
            "tr",
            {},
            el("td", {}, String(a.id)),
            el("td", {}, a.pc_id),
            el("td", {}, a.mac ?? ""),
            el("td", {}, a.reason ?? ""),
            el("td", {}, String(a.score ?? "")),
            el("td", {}, a.image_ref ? `image #${a.image_ref}` : "(no evidence)"),
          ),
        ),
      );
      if (triage.rows.length === 0 && !triage.loading) {
        status.textContent = "No alerts match the current view.";
      } else if (triage.retryBanner) {
        status.textContent = `Refresh failed (${triage.lastError}); showing stale data.`;
      } else {
        status.textContent = `${triage.total} alerts total`;
      }
    };
    content.replaceChildren(
      el("section", {}, el("h2", {}, "alert triage"), macFilter, minScore, apply, status, table),
    );
    void triage.refresh();
  }

  function renderBlacklists(content: HTMLElement) {
    content.replaceChildren();
    for (const category of CATEGORIES) {
      const editor = new BlacklistEditor(client, category);
      const list = el("ul", {});
      const input = el("input", { placeholder: category === "malicious-port" ? "port:banner" : "value" });
      const version = el("span", {}, "");
      const notice = el("p", {}, "");
      const add = el("button", {}, "Add");
      editor.onChange = () => {
        list.replaceChildren(
          ...editor.entries.map((e) => {
            const remove = el("button", {}, "remove");
            remove.addEventListener("click", () => void editor.remove(e.id));
            return el(
              "li",
              {},
              category === "malicious-port" ? `${e.port}:${e.banner ?? ""}` : (e.value ?? ""),
              remove,
            );
          }),
        );
        version.textContent = ` policy v${editor.policyVersion}`;
        notice.textContent = editor.notice?.text ?? "";
        notice.className = editor.notice?.kind ?? "";
      };
      add.addEventListener("click", () => {
        if (category === "malicious-port") {
          const [port, ...banner] = input.value.split(":");
          void editor.add({ port: Number(port), banner: banner.join(":") });
        } else {
          void editor.add({ value: input.value });
        }
      });
      content.append(el("section", {}, el("h2", {}, category), version, input, add, notice, list));
      void editor.load();
    }
  }

  function renderExports(content: HTMLElement) {
    const idInput = el("input", { placeholder: "alert id", type: "number" });
    const output = el("pre", {});
    const hashLine = el("p", { class: "hash" });
    const badge = el("span", { class: "verify-badge" });
    const download = el("button", {}, "Export with hash");
    download.addEventListener("click", async () => {
      const result = await exportWithHash(client, Number(idInput.value));
      output.textContent = result.json;
      hashLine.textContent = `SHA-256: ${result.hash}${result.emptyEvidence ? " (empty evidence)" : ""}`;
      const blob = new Blob([result.json], { type: "application/json" });
      const link = el("a", { href: URL.createObjectURL(blob), download: result.fileName }, "");
      link.click();
    });
    const upload = el("textarea", { placeholder: "paste an exported document to verify" });
    const verify = el("button", {}, "Verify");
    verify.addEventListener("click", async () => {
      const result = await verifyUpload(client, upload.value);
      badge.textContent = result.state === "valid" ? "valid" : `invalid: ${result.reason}`;
      badge.className = `verify-badge ${result.state}`;
    });
    content.replaceChildren(
      el("section", {}, el("h2", {}, "alert exports"), idInput, download, hashLine, output),
      el("section", {}, el("h2", {}, "verify a record"), upload, verify, badge),
    );
  }

  renderLogin();
}
