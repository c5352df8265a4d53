/** Display-side reading of the design texts the service prints.
 *
 * The tree built here only mirrors the printed syntax; which moves are
 * legal, and where a run goes, is always the service's call.  Each node
 * carries the occurrence name the token walk would give it, so overlay
 * documents can address nodes without any client-side rule logic.
 */

export type DesignNodeKind =
  | "positive"
  | "negative"
  | "branch"
  | "daimon"
  | "omega";

export interface DesignNode {
  kind: DesignNodeKind;
  /** Printed head of the node: "(+ 0 {0 1})", "(- 0.0)", "{0}", "dai". */
  label: string;
  /** Chronicle action string the node corresponds to, when it is one. */
  action: string | null;
  /** Occurrence name from the token walk, when the node carries one. */
  occurrence: string | null;
  address: string | null;
  ram: string | null;
  children: DesignNode[];
}

export class DesignTextError extends Error {}

type Token = string;

class TokenStream {
  private pos = 0;

  constructor(private readonly tokens: Token[]) {}

  peek(ahead = 0): Token | undefined {
    return this.tokens[this.pos + ahead];
  }

  next(): Token {
    const token = this.tokens[this.pos];
    if (token === undefined) {
      throw new DesignTextError("design text ends early");
    }
    this.pos += 1;
    return token;
  }

  expect(token: Token): void {
    const got = this.next();
    if (got !== token) {
      throw new DesignTextError(`expected ${token}, got ${got}`);
    }
  }

  done(): boolean {
    return this.pos >= this.tokens.length;
  }
}

function tokenize(text: string): TokenStream {
  const tokens: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (/\s/.test(ch)) {
      i += 1;
    } else if (ch === "(" || ch === ")") {
      tokens.push(ch);
      i += 1;
    } else if (ch === "{") {
      const close = text.indexOf("}", i);
      if (close < 0) throw new DesignTextError("unclosed ramification");
      tokens.push(text.slice(i, close + 1));
      i = close + 1;
    } else if (text.startsWith("->", i)) {
      tokens.push("->");
      i += 2;
    } else {
      let j = i;
      while (j < text.length && !/[\s(){}]/.test(text[j]) &&
             !text.startsWith("->", j)) {
        j += 1;
      }
      tokens.push(text.slice(i, j));
      i = j;
    }
  }
  return new TokenStream(tokens);
}

function leafNode(kind: "daimon" | "omega"): DesignNode {
  return {
    kind,
    label: kind === "daimon" ? "dai" : "omega",
    action: null,
    occurrence: null,
    address: null,
    ram: null,
    children: [],
  };
}

function parsePositive(ts: TokenStream): DesignNode {
  const head = ts.peek();
  if (head === "dai" || head === "omega") {
    ts.next();
    return leafNode(head === "dai" ? "daimon" : "omega");
  }
  ts.expect("(");
  ts.expect("+");
  const address = ts.next();
  const ram = ts.next();
  if (!ram.startsWith("{")) {
    throw new DesignTextError(`expected a ramification, got ${ram}`);
  }
  const children: DesignNode[] = [];
  while (ts.peek() === "(") {
    children.push(parseNegative(ts));
  }
  ts.expect(")");
  const label = `(+ ${address} ${ram})`;
  return {
    kind: "positive",
    label,
    action: label,
    occurrence: null,
    address,
    ram,
    children,
  };
}

function parseNegative(ts: TokenStream): DesignNode {
  ts.expect("(");
  ts.expect("-");
  const address = ts.next();
  const branches: DesignNode[] = [];
  while (ts.peek() === "(") {
    ts.expect("(");
    const ram = ts.next();
    if (!ram.startsWith("{")) {
      throw new DesignTextError(`expected a branch ramification, got ${ram}`);
    }
    ts.expect("->");
    const sub = parsePositive(ts);
    ts.expect(")");
    branches.push({
      kind: "branch",
      label: ram,
      action: `(- ${address} ${ram})`,
      occurrence: null,
      address,
      ram,
      children: [sub],
    });
  }
  ts.expect(")");
  return {
    kind: "negative",
    label: `(- ${address})`,
    action: null,
    occurrence: null,
    address,
    ram: null,
    children: branches,
  };
}

function lastComponent(address: string): string {
  const parts = address.split(".");
  return parts[parts.length - 1];
}

/* Occurrence names follow the token walk: the principal's root is "e",
 * a branch under a positive at O is O.i.J (root stem empty), the
 * positive under a branch appends ".1", and a partner's root branches
 * are named by their ramification alone. */

function nameBranches(positive: DesignNode, occurrence: string): void {
  positive.occurrence = occurrence;
  const stem = occurrence === "e" ? "" : `${occurrence}.`;
  for (const negative of positive.children) {
    const index = lastComponent(negative.address ?? "");
    for (const branch of negative.children) {
      branch.occurrence = `${stem}${index}.${branch.ram}`;
      nameBranches(branch.children[0], `${branch.occurrence}.1`);
    }
  }
}

export function parseDesignText(
  text: string,
  role: "principal" | "partner",
): DesignNode {
  const ts = tokenize(text);
  let root: DesignNode;
  if (role === "principal") {
    root = parsePositive(ts);
    nameBranches(root, "e");
  } else {
    root = parseNegative(ts);
    for (const branch of root.children) {
      branch.occurrence = branch.ram;
      nameBranches(branch.children[0], `${branch.occurrence}.1`);
    }
  }
  if (!ts.done()) {
    throw new DesignTextError("trailing tokens after the design");
  }
  return root;
}

export function serializeDesign(node: DesignNode): string {
  switch (node.kind) {
    case "daimon":
      return "dai";
    case "omega":
      return "omega";
    case "positive": {
      const children = node.children
        .map((child) => ` ${serializeDesign(child)}`)
        .join("");
      return `(+ ${node.address} ${node.ram}${children})`;
    }
    case "negative": {
      const branches = node.children
        .map((b) => ` (${b.ram} -> ${serializeDesign(b.children[0])})`)
        .join("");
      return `(- ${node.address}${branches})`;
    }
    case "branch":
      return `(${node.ram} -> ${serializeDesign(node.children[0])})`;
  }
}

export function walkNodes(
  node: DesignNode,
  visit: (node: DesignNode) => void,
): void {
  visit(node);
  for (const child of node.children) {
    walkNodes(child, visit);
  }
}

/** Every occurrence name in the tree, sorted like the service sorts. */
export function collectOccurrences(root: DesignNode): string[] {
  const names: string[] = [];
  walkNodes(root, (node) => {
    if (node.occurrence !== null) names.push(node.occurrence);
  });
  return names.sort();
}
