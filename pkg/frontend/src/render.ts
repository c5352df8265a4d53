/** Render a session view to an HTML string. */

import type { SessionView, TreeNode } from "./view.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const BANNER_TEXT: Record<string, string> = {
  daimon: "the daimon ends the run",
  "syntactic-omega": "the run dies on a missing branch",
  "created-omega": "the run stops on exhausted fuel",
};

function renderTree(node: TreeNode): string {
  const classes = ["node", node.kind];
  if (node.visited) classes.push("visited");
  if (node.dimmed) classes.push("dimmed");
  const occurrence =
    node.occurrence === null
      ? ""
      : ` data-occurrence="${escapeHtml(node.occurrence)}"`;
  const children = node.children.length
    ? `<ul>${node.children.map((c) => `<li>${renderTree(c)}</li>`).join("")}</ul>`
    : "";
  return (
    `<span class="${classes.join(" ")}"${occurrence}>` +
    `${escapeHtml(node.label)}</span>${children}`
  );
}

export function renderHtml(view: SessionView): string {
  const parts: string[] = [];
  if (view.diagnostic !== null) {
    parts.push(`<p class="diagnostic">${escapeHtml(view.diagnostic)}</p>`);
  }
  if (view.banner !== null) {
    parts.push(
      `<p class="banner banner-${view.banner}">` +
        `${escapeHtml(BANNER_TEXT[view.banner])}</p>`,
    );
  }
  if (view.sessionId !== null) {
    parts.push(
      `<p class="session-id">session ${escapeHtml(view.sessionId)}</p>`,
    );
  }
  if (view.q.length) {
    const items = view.q
      .map((action) => `<li>${escapeHtml(action)}</li>`)
      .join("");
    parts.push(`<ol class="q">${items}</ol>`);
  }
  if (view.history.length) {
    const items = view.history
      .map(
        (c, k) =>
          `<li>${c.i} ${escapeHtml(c.ram)} ` +
          `<button data-undo="${k}">undo to here</button></li>`,
      )
      .join("");
    parts.push(`<ol class="history">${items}</ol>`);
  }
  if (view.palette.length) {
    const buttons = view.palette
      .map(
        (c) =>
          `<button data-i="${c.i}" data-ram="${escapeHtml(c.ram)}">` +
          `${c.i} ${escapeHtml(c.ram)}</button>`,
      )
      .join("");
    parts.push(`<div class="palette">${buttons}</div>`);
  }
  if (view.principal !== null) {
    parts.push(
      `<div class="tree principal">${renderTree(view.principal)}</div>`,
    );
  }
  view.partners.forEach((partner, index) => {
    parts.push(
      `<div class="tree partner" data-partner="${index}">` +
        `${renderTree(partner)}</div>`,
    );
  });
  return parts.join("\n");
}
