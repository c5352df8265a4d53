/** Session driver: every transition is a round trip to the service.
 *
 * The driver never predicts what a move will do.  It holds the last
 * document the service returned (plus its exact bytes), rebuilds the
 * view from that document alone, and handles conflicts by re-reading
 * the session.  Undo replays a history prefix through a fresh session.
 */

import {
  ServiceClient,
  type SessionOptions,
} from "./api.js";
import {
  isErrorDocument,
  isSessionDocument,
  type ChoiceOffer,
  type ConflictDocument,
  type SessionDocument,
  type TokenSection,
} from "./documents.js";
import {
  buildView,
  errorView,
  withDiagnostic,
  type SessionView,
} from "./view.js";

export interface ExplorerState {
  client: ServiceClient;
  netText: string;
  options: SessionOptions;
  doc: SessionDocument | null;
  /** Exact bytes of the document the view was built from. */
  raw: string | null;
  view: SessionView;
  overlay: TokenSection | null;
  /** True when the last transition was recovered via a refresh. */
  refreshed: boolean;
}

function sessionState(
  client: ServiceClient,
  netText: string,
  options: SessionOptions,
  doc: SessionDocument,
  raw: string,
  overlay: TokenSection | null = null,
): ExplorerState {
  return {
    client,
    netText,
    options,
    doc,
    raw,
    view: buildView(doc, overlay),
    overlay,
    refreshed: false,
  };
}

export async function connect(
  client: ServiceClient,
  netText: string,
  options: SessionOptions = {},
): Promise<ExplorerState> {
  const reply = await client.createSession(netText, options);
  if (reply.status === 201 && isSessionDocument(reply.doc)) {
    return sessionState(client, netText, options, reply.doc, reply.raw);
  }
  const message = isErrorDocument(reply.doc)
    ? reply.doc.error
    : `unexpected reply (${reply.status})`;
  return {
    client,
    netText,
    options,
    doc: null,
    raw: null,
    view: errorView(message),
    overlay: null,
    refreshed: false,
  };
}

export async function choose(
  state: ExplorerState,
  choice: ChoiceOffer,
): Promise<ExplorerState> {
  if (state.doc === null || state.doc.id === undefined) {
    throw new Error("no active session to choose in");
  }
  const reply = await state.client.postChoice(state.doc.id, choice);
  if (reply.status === 200 && isSessionDocument(reply.doc)) {
    return sessionState(
      state.client,
      state.netText,
      state.options,
      reply.doc,
      reply.raw,
    );
  }
  if (reply.status === 409) {
    const offered = (reply.doc as ConflictDocument).offered;
    const fresh = await state.client.getSession(state.doc.id);
    if (fresh.status !== 200 || !isSessionDocument(fresh.doc)) {
      throw new Error("the session vanished while refreshing");
    }
    const next = sessionState(
      state.client,
      state.netText,
      state.options,
      fresh.doc,
      fresh.raw,
    );
    const message =
      `choice ${choice.i} ${choice.ram} is not offered ` +
      `(${offered.length} offered); state refreshed`;
    return { ...next, view: withDiagnostic(next.view, message), refreshed: true };
  }
  const message = isErrorDocument(reply.doc)
    ? reply.doc.error
    : `unexpected reply (${reply.status})`;
  return { ...state, view: withDiagnostic(state.view, message) };
}

/** Rewind to the first `keep` choices by replaying them in a new session. */
export async function undoTo(
  state: ExplorerState,
  keep: number,
): Promise<ExplorerState> {
  if (state.doc === null) {
    throw new Error("no active session to rewind");
  }
  const prefix = state.doc.history.slice(0, keep);
  let next = await connect(state.client, state.netText, state.options);
  for (const choice of prefix) {
    next = await choose(next, choice);
  }
  return next;
}

/** Overlay the token walk's visited occurrences onto the session trees. */
export async function inspectPullback(
  state: ExplorerState,
): Promise<ExplorerState> {
  if (state.doc === null) {
    throw new Error("no active session to inspect");
  }
  const reply = await state.client.orthogonal(state.netText);
  if (isErrorDocument(reply.doc)) {
    return { ...state, view: withDiagnostic(state.view, reply.doc.error) };
  }
  if (!reply.doc.accepted || reply.doc.token === null) {
    return {
      ...state,
      view: withDiagnostic(state.view, "the net is not orthogonal"),
    };
  }
  const overlay = reply.doc.token;
  return {
    ...state,
    overlay,
    view: buildView(state.doc, overlay),
    refreshed: false,
  };
}

/** Chronicles of every session state reachable through the palette. */
export async function exploreAll(
  client: ServiceClient,
  netText: string,
  options: SessionOptions = {},
): Promise<Set<string>> {
  const chronicles = new Set<string>();
  const stack: ChoiceOffer[][] = [[]];
  while (stack.length) {
    const history = stack.pop()!;
    let state = await connect(client, netText, options);
    for (const choice of history) {
      state = await choose(state, choice);
    }
    if (state.doc === null) {
      throw new Error(state.view.diagnostic ?? "exploration lost its session");
    }
    chronicles.add(state.doc.chronicle);
    for (const offer of state.doc.offered) {
      stack.push([...history, offer]);
    }
  }
  return chronicles;
}

export type { SessionView };
