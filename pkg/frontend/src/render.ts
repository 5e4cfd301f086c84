/**
 * DOM layer: mounts the explorer widget into the page, draws neighborhood
 * views as SVG, and wires the controls (search, radius, edge-kind filter).
 *
 * The widget is strictly additive. It only ever touches its own mount
 * element, so a failed load leaves the static page exactly as emitted.
 */

import {
  ClientGraph,
  EDGE_KINDS,
  NeighborhoodView,
  displayName,
  neighborhood,
  pagePath,
  search,
} from "./core";

export const KIND_COLORS: Record<string, string> = {
  concept: "#1a4d8f",
  problem: "#a23b2e",
  pattern: "#2e7d32",
  strategy: "#6b3fa0",
  domain: "#8a6d1a",
};

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW_BOX = "-270 -270 540 540";
const LABEL_LIMIT = 26;

export interface ExplorerOptions {
  /** Prefix from the current page to the site root ("", "../", or absolute). */
  root: string;
  /** Initial center id; empty string shows the search prompt instead. */
  center: string;
  /** Navigation hook, replaceable in tests; defaults to location.assign. */
  navigate?: (url: string) => void;
}

interface ExplorerState {
  center: string;
  radius: number;
  kinds: Set<string>;
}

export function showError(mount: HTMLElement, message: string): void {
  const banner = mount.ownerDocument.createElement("p");
  banner.className = "explorer-error";
  banner.setAttribute(
    "style",
    "border: 1px solid #c99; background: #fee; color: #622; padding: 0.5rem 0.75rem; border-radius: 4px;",
  );
  banner.textContent = `Graph explorer unavailable: ${message}. The rest of the page works without it.`;
  mount.replaceChildren(banner);
}

export function showLoading(mount: HTMLElement): void {
  const note = mount.ownerDocument.createElement("p");
  note.className = "explorer-loading";
  note.textContent = "Loading the knowledge graph...";
  mount.replaceChildren(note);
}

function label(text: string): string {
  return text.length > LABEL_LIMIT ? text.slice(0, LABEL_LIMIT - 1) + "…" : text;
}

function drawView(
  doc: Document,
  graph: ClientGraph,
  view: NeighborhoodView,
  options: ExplorerOptions,
  recenter: (id: string) => void,
): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", VIEW_BOX);
  svg.setAttribute("role", "img");

  const position = new Map(view.nodes.map((n) => [n.id, n]));
  for (const edge of view.edges) {
    const from = position.get(edge.from);
    const to = position.get(edge.to);
    if (!from || !to) {
      continue;
    }
    const line = doc.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.setAttribute("stroke", "#bbb");
    line.setAttribute("stroke-width", "1");
    line.setAttribute("data-kind", edge.kind);
    const title = doc.createElementNS(SVG_NS, "title");
    title.textContent = `${edge.from} ${edge.kind} ${edge.to}`;
    line.appendChild(title);
    svg.appendChild(line);
  }

  for (const placed of view.nodes) {
    const node = graph.nodes.get(placed.id);
    if (!node) {
      continue;
    }
    const anchor = doc.createElementNS(SVG_NS, "a");
    anchor.setAttribute("href", options.root + pagePath(node));
    anchor.setAttribute("data-id", node.id);
    anchor.setAttribute("transform", `translate(${placed.x} ${placed.y})`);
    if (node.id === view.center) {
      anchor.setAttribute("class", "center");
    }

    const circle = doc.createElementNS(SVG_NS, "circle");
    circle.setAttribute("r", node.id === view.center ? "22" : "16");
    circle.setAttribute("fill", KIND_COLORS[node.kind] ?? "#555");
    if (node.id === view.center) {
      circle.setAttribute("stroke", "#222");
      circle.setAttribute("stroke-width", "3");
    }
    const title = doc.createElementNS(SVG_NS, "title");
    title.textContent = node.summary ? `${node.id}: ${node.summary}` : node.id;
    circle.appendChild(title);
    anchor.appendChild(circle);

    const text = doc.createElementNS(SVG_NS, "text");
    text.setAttribute("y", node.id === view.center ? "38" : "30");
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("font-size", "11");
    text.setAttribute("fill", "#222");
    text.textContent = label(displayName(node));
    anchor.appendChild(text);

    // single click re-centers in place; double click (or the plain
    // hyperlink) goes to the node's page
    anchor.addEventListener("click", (event) => {
      event.preventDefault();
      recenter(node.id);
    });
    anchor.addEventListener("dblclick", (event) => {
      event.preventDefault();
      const go = options.navigate ?? ((url: string) => window.location.assign(url));
      go(options.root + pagePath(node));
    });
    svg.appendChild(anchor);
  }
  return svg;
}

export function mountExplorer(
  mount: HTMLElement,
  graph: ClientGraph,
  options: ExplorerOptions,
): void {
  const doc = mount.ownerDocument;
  const state: ExplorerState = {
    center: options.center,
    radius: 1,
    kinds: new Set(EDGE_KINDS),
  };

  const controls = doc.createElement("div");
  controls.className = "explorer-controls";
  controls.setAttribute("style", "font-size: 0.85rem; margin-bottom: 0.5rem;");

  const searchBox = doc.createElement("input");
  searchBox.type = "search";
  searchBox.placeholder = "Search names";
  searchBox.setAttribute("aria-label", "Search node names");
  controls.appendChild(searchBox);

  const radiusPick = doc.createElement("select");
  radiusPick.setAttribute("aria-label", "Neighborhood radius");
  for (const value of ["1", "2"]) {
    const option = doc.createElement("option");
    option.value = value;
    option.textContent = `radius ${value}`;
    radiusPick.appendChild(option);
  }
  radiusPick.addEventListener("change", () => {
    state.radius = Number(radiusPick.value);
    redraw();
  });
  controls.appendChild(radiusPick);

  const filters = doc.createElement("details");
  const summary = doc.createElement("summary");
  summary.textContent = "link kinds";
  filters.appendChild(summary);
  for (const kind of EDGE_KINDS) {
    const wrap = doc.createElement("label");
    wrap.setAttribute("style", "margin-right: 0.6rem; white-space: nowrap;");
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.value = kind;
    box.addEventListener("change", () => {
      if (box.checked) {
        state.kinds.add(kind);
      } else {
        state.kinds.delete(kind);
      }
      redraw();
    });
    wrap.appendChild(box);
    wrap.appendChild(doc.createTextNode(" " + kind));
    filters.appendChild(wrap);
  }
  controls.appendChild(filters);

  const results = doc.createElement("ul");
  results.className = "explorer-results";
  results.setAttribute("style", "list-style: none; margin: 0.25rem 0; padding: 0;");
  searchBox.addEventListener("input", () => {
    results.replaceChildren();
    for (const id of search(graph, searchBox.value).slice(0, 8)) {
      const node = graph.nodes.get(id);
      if (!node) {
        continue;
      }
      const item = doc.createElement("li");
      const link = doc.createElement("a");
      link.href = options.root + pagePath(node);
      link.textContent = `${displayName(node)} (${node.kind})`;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        results.replaceChildren();
        searchBox.value = "";
        recenter(id);
      });
      item.appendChild(link);
      results.appendChild(item);
    }
  });
  controls.appendChild(results);

  const stage = doc.createElement("div");
  stage.className = "explorer-stage";

  function recenter(id: string): void {
    state.center = id;
    redraw();
  }

  function redraw(): void {
    const view =
      state.center === ""
        ? null
        : neighborhood(graph, state.center, state.radius, state.kinds);
    if (view === null) {
      const note = doc.createElement("p");
      note.className = "explorer-empty";
      note.textContent =
        state.center === ""
          ? "Search for a node to start exploring."
          : `No node ${state.center} in this knowledge base.`;
      stage.replaceChildren(note);
      return;
    }
    stage.replaceChildren(drawView(doc, graph, view, options, recenter));
  }

  mount.replaceChildren(controls, stage);
  redraw();
}
