/** The explorer's screen state as a pure function of service documents.
 *
 * Nothing here decides what a session may do next; every field is read
 * off the state document (and, for overlays, the orthogonality
 * document) that the service returned.
 */

import type {
  ChoiceOffer,
  SessionDocument,
  TokenSection,
} from "./documents.js";
import { parseDesignText, walkNodes, type DesignNode } from "./designText.js";

export type BannerKind = "daimon" | "syntactic-omega" | "created-omega";

export interface TreeNode {
  kind: DesignNode["kind"];
  label: string;
  occurrence: string | null;
  visited: boolean;
  dimmed: boolean;
  children: TreeNode[];
}

export interface SessionView {
  sessionId: string | null;
  banner: BannerKind | null;
  diagnostic: string | null;
  chronicle: string;
  q: string[];
  history: ChoiceOffer[];
  palette: ChoiceOffer[];
  ended: boolean;
  focus: string | null;
  ramification: string | null;
  principal: TreeNode | null;
  partners: TreeNode[];
  overlay: TokenSection | null;
}

const BANNERS: Record<string, BannerKind> = {
  daimon: "daimon",
  omega: "syntactic-omega",
  "omega-created": "created-omega",
};

function annotateTree(
  root: DesignNode,
  playedActions: Set<string>,
  visitedOccurrences: Set<string> | null,
): TreeNode {
  const convert = (node: DesignNode): TreeNode => {
    let visited: boolean;
    let dimmed: boolean;
    if (visitedOccurrences !== null) {
      visited =
        node.occurrence !== null && visitedOccurrences.has(node.occurrence);
      dimmed = node.occurrence !== null && !visited;
    } else {
      visited = node.action !== null && playedActions.has(node.action);
      dimmed = false;
    }
    return {
      kind: node.kind,
      label: node.label,
      occurrence: node.occurrence,
      visited,
      dimmed,
      children: node.children.map(convert),
    };
  };
  return convert(root);
}

export function buildView(
  doc: SessionDocument,
  overlay: TokenSection | null = null,
): SessionView {
  const played = new Set(doc.q);
  const principal = annotateTree(
    parseDesignText(doc.designs.principal, "principal"),
    played,
    overlay === null ? null : new Set(overlay["visited-principal"]),
  );
  const partners = doc.designs.partners.map((text, index) => {
    let visited: Set<string> | null = null;
    if (overlay !== null) {
      visited = index === 0 ? new Set(overlay["visited-partner"]) : new Set();
    }
    return annotateTree(parseDesignText(text, "partner"), played, visited);
  });
  return {
    sessionId: doc.id ?? null,
    banner: BANNERS[doc.outcome] ?? null,
    diagnostic: null,
    chronicle: doc.chronicle,
    q: doc.q,
    history: doc.history,
    palette: doc.offered,
    ended: doc.ended,
    focus: doc.focus,
    ramification: doc.ramification,
    principal,
    partners,
    overlay,
  };
}

/** A view that only carries an inline diagnostic, e.g. a 400 reply. */
export function errorView(message: string): SessionView {
  return {
    sessionId: null,
    banner: null,
    diagnostic: message,
    chronicle: "",
    q: [],
    history: [],
    palette: [],
    ended: false,
    focus: null,
    ramification: null,
    principal: null,
    partners: [],
    overlay: null,
  };
}

export function withDiagnostic(
  view: SessionView,
  message: string,
): SessionView {
  return { ...view, diagnostic: message };
}

/** Occurrences of the nodes a flag is set on, sorted like the service. */
export function flaggedOccurrences(
  tree: TreeNode,
  flag: "visited" | "dimmed",
): string[] {
  const names: string[] = [];
  const walk = (node: TreeNode): void => {
    if (node[flag] && node.occurrence !== null) names.push(node.occurrence);
    for (const child of node.children) walk(child);
  };
  walk(tree);
  return names.sort();
}

export { walkNodes };
