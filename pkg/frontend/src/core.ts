/**
 * Client-side model of the emitted graph export.
 *
 * Everything in this module is pure and synchronous: parsing the export
 * into a ClientGraph, cutting out a neighborhood view with a deterministic
 * radial layout, and ranked name search. The DOM layer sits on top in
 * render.ts; nothing here touches the browser.
 */

export type NodeKind = "concept" | "problem" | "pattern" | "strategy" | "domain";

const NODE_KINDS: readonly string[] = [
  "concept",
  "problem",
  "pattern",
  "strategy",
  "domain",
];

export const EDGE_KINDS: readonly string[] = [
  "definition",
  "domain",
  "generalization",
  "motivates",
  "pattern-specialization",
  "problem",
  "prominent-concept",
  "prominent-problem",
  "solution",
  "specialization",
  "step",
  "strategy",
  "used-in",
];

export interface GraphNode {
  id: string;
  kind: NodeKind;
  names: string[];
  domain: string | null;
  summary: string;
}

/** One stored half-edge: the far endpoint plus the edge kind and which
 * side of the original edge this node is on. */
export interface Neighbor {
  id: string;
  kind: string;
  direction: "out" | "in";
}

export interface ClientGraph {
  nodes: Map<string, GraphNode>;
  adjacency: Map<string, Neighbor[]>;
}

export class GraphFormatError extends Error {}

function fail(message: string): never {
  throw new GraphFormatError(message);
}

function asRecord(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(`${what} is not an object`);
  }
  return value as Record<string, unknown>;
}

function asArray(value: unknown, what: string): unknown[] {
  if (!Array.isArray(value)) {
    fail(`${what} is not an array`);
  }
  return value;
}

function asString(value: unknown, what: string): string {
  if (typeof value !== "string") {
    fail(`${what} is not a string`);
  }
  return value;
}

/** Code-point comparison; ids and kinds are ASCII so this matches the
 * emitter's sort order exactly, independent of the runtime locale. */
function cmp(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}

/**
 * Validate a decoded export document and index it for traversal.
 *
 * Adjacency is symmetric in storage: every edge is retrievable from both
 * endpoints, with the direction flag telling which side the original edge
 * started on. Neighbor lists are sorted so identical documents always
 * produce identical structures.
 */
export function parseGraph(data: unknown): ClientGraph {
  const document = asRecord(data, "document");
  const nodes = new Map<string, GraphNode>();
  for (const raw of asArray(document.nodes, "nodes")) {
    const entry = asRecord(raw, "node");
    const id = asString(entry.id, "node id");
    const kind = asString(entry.kind, `kind of ${id}`);
    if (!NODE_KINDS.includes(kind)) {
      fail(`node ${id} has unknown kind ${kind}`);
    }
    const names = asArray(entry.names, `names of ${id}`).map((n) =>
      asString(n, `name of ${id}`),
    );
    const domain =
      entry.domain === null ? null : asString(entry.domain, `domain of ${id}`);
    if (nodes.has(id)) {
      fail(`duplicate node ${id}`);
    }
    nodes.set(id, {
      id,
      kind: kind as NodeKind,
      names,
      domain,
      summary: asString(entry.summary, `summary of ${id}`),
    });
  }

  const adjacency = new Map<string, Neighbor[]>();
  for (const id of nodes.keys()) {
    adjacency.set(id, []);
  }
  for (const raw of asArray(document.edges, "edges")) {
    const entry = asRecord(raw, "edge");
    const from = asString(entry.from, "edge source");
    const to = asString(entry.to, "edge target");
    const kind = asString(entry.kind, "edge kind");
    if (!nodes.has(from) || !nodes.has(to)) {
      fail(`edge ${from} -> ${to} leaves the node set`);
    }
    if (!EDGE_KINDS.includes(kind)) {
      fail(`edge ${from} -> ${to} has unknown kind ${kind}`);
    }
    adjacency.get(from)!.push({ id: to, kind, direction: "out" });
    if (to !== from) {
      adjacency.get(to)!.push({ id: from, kind, direction: "in" });
    }
  }
  for (const list of adjacency.values()) {
    list.sort(
      (a, b) => cmp(a.id, b.id) || cmp(a.kind, b.kind) || cmp(a.direction, b.direction),
    );
  }
  return { nodes, adjacency };
}

/** Fetch and parse the export; any failure rejects and the caller falls
 * back to the static pages (degraded mode). */
export async function loadGraph(url: string): Promise<ClientGraph> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new GraphFormatError(`fetching ${url} failed: ${response.status}`);
  }
  let decoded: unknown;
  try {
    decoded = await response.json();
  } catch (err) {
    throw new GraphFormatError(`graph document is not valid JSON: ${err}`);
  }
  return parseGraph(decoded);
}

export function displayName(node: GraphNode): string {
  const first = node.names[0];
  return first !== undefined && first !== ""
    ? first
    : node.id.replace(/-/g, " ");
}

/** Site-relative page location; prepend the site root to make it a URL. */
export function pagePath(node: GraphNode): string {
  return `${node.kind}/${node.id}.html`;
}

export interface ViewNode {
  id: string;
  ring: number;
  x: number;
  y: number;
}

export interface ViewEdge {
  from: string;
  to: string;
  kind: string;
}

export interface NeighborhoodView {
  center: string;
  nodes: ViewNode[];
  edges: ViewEdge[];
}

const RING_RADII = [0, 130, 230];

/** Two decimal places, with negative zero normalized away. */
function round2(value: number): number {
  const rounded = Math.round(value * 100) / 100;
  return rounded === 0 ? 0 : rounded;
}

/**
 * The nodes within `radius` edges of `center` under the edge-kind filter,
 * plus every passing edge among them, positioned on concentric rings.
 *
 * Radius is clamped to 1 or 2. With radius 1 the view holds exactly the
 * center and its filtered neighbors. The layout is a fixed function of
 * the view contents: ring members are sorted by id and spread evenly,
 * so the same graph, center, and filter always draw the same picture.
 */
export function neighborhood(
  graph: ClientGraph,
  center: string,
  radius: number,
  filter?: ReadonlySet<string>,
): NeighborhoodView | null {
  if (!graph.nodes.has(center)) {
    return null;
  }
  const depth = Math.max(1, Math.min(2, Math.floor(radius)));
  const passes = (kind: string) => filter === undefined || filter.has(kind);

  const ringOf = new Map<string, number>([[center, 0]]);
  let frontier = [center];
  for (let ring = 1; ring <= depth; ring += 1) {
    const next: string[] = [];
    for (const id of frontier) {
      for (const step of graph.adjacency.get(id) ?? []) {
        if (passes(step.kind) && !ringOf.has(step.id)) {
          ringOf.set(step.id, ring);
          next.push(step.id);
        }
      }
    }
    frontier = next;
  }

  const nodes: ViewNode[] = [];
  for (let ring = 0; ring <= depth; ring += 1) {
    const members = [...ringOf.entries()]
      .filter(([, r]) => r === ring)
      .map(([id]) => id)
      .sort(cmp);
    members.forEach((id, index) => {
      const angle = (2 * Math.PI * index) / members.length - Math.PI / 2;
      const r = RING_RADII[ring] ?? 0;
      nodes.push({
        id,
        ring,
        x: round2(Math.cos(angle) * r),
        y: round2(Math.sin(angle) * r),
      });
    });
  }

  const edges: ViewEdge[] = [];
  for (const [id, steps] of graph.adjacency) {
    if (!ringOf.has(id)) {
      continue;
    }
    for (const step of steps) {
      // each edge is stored twice; keep the outgoing copy only
      if (step.direction === "out" && passes(step.kind) && ringOf.has(step.id)) {
        edges.push({ from: id, to: step.id, kind: step.kind });
      }
    }
  }
  edges.sort((a, b) => cmp(a.from, b.from) || cmp(a.kind, b.kind) || cmp(a.to, b.to));
  return { center, nodes, edges };
}

/**
 * Ranked name search: exact match beats prefix beats substring, all
 * case-insensitive, ties broken by id. A node ranks by its best name.
 * The empty (or blank) query matches nothing.
 */
export function search(graph: ClientGraph, query: string): string[] {
  const needle = query.trim().toLowerCase();
  if (needle === "") {
    return [];
  }
  const ranked: { id: string; rank: number }[] = [];
  for (const node of graph.nodes.values()) {
    let best = Infinity;
    for (const name of node.names) {
      const hay = name.toLowerCase();
      if (hay === needle) {
        best = Math.min(best, 0);
      } else if (hay.startsWith(needle)) {
        best = Math.min(best, 1);
      } else if (hay.includes(needle)) {
        best = Math.min(best, 2);
      }
    }
    if (best < Infinity) {
      ranked.push({ id: node.id, rank: best });
    }
  }
  ranked.sort((a, b) => a.rank - b.rank || cmp(a.id, b.id));
  return ranked.map((entry) => entry.id);
}
