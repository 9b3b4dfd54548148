import { ApiError, isOffline } from "./api.js";

/** Escape user-entered text before it goes into an innerHTML template. */
export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function fmt(value: number, digits = 2): string {
  return value.toFixed(digits);
}

/** Seconds to a compact "4m 30s" label. */
export function fmtDuration(seconds: number): string {
  const m = Math.floor(seconds / 60);
  const s = Math.round(seconds % 60);
  if (m === 0) return `${s}s`;
  return s === 0 ? `${m}m` : `${m}m ${s}s`;
}

export function errorText(err: unknown): string {
  if (isOffline(err)) return "gateway unreachable";
  if (err instanceof ApiError) return err.message;
  return String(err);
}

/**
 * Shows a dismissable message in a page's notice slot. Kind picks the style;
 * errors stay until replaced, info fades on the next render.
 */
export function showNotice(root: HTMLElement, text: string, kind: "info" | "error" = "info"): void {
  const slot = root.querySelector<HTMLElement>(".notice");
  if (!slot) return;
  slot.textContent = text;
  slot.className = `notice notice-${kind}`;
  slot.hidden = text === "";
}

export function clearNotice(root: HTMLElement): void {
  showNotice(root, "");
}
