/**
 * Entry point for the bundled explorer script. Finds the mount element the
 * site emitter put on every page, fetches graph.json, and hands control to
 * the renderer. Any failure is reported inside the mount element only.
 */

import { loadGraph } from "./core";
import { mountExplorer, showError, showLoading } from "./render";

const GRAPH_FILE = "graph.json";

export function siteRoot(graphUrl: string): string {
  return graphUrl.endsWith(GRAPH_FILE)
    ? graphUrl.slice(0, graphUrl.length - GRAPH_FILE.length)
    : "";
}

export async function boot(doc: Document): Promise<void> {
  const mount = doc.getElementById("knoweb-explorer");
  if (!(mount instanceof HTMLElement)) {
    return;
  }
  const graphUrl = mount.dataset.graphUrl;
  if (!graphUrl) {
    showError(mount, "no graph location configured");
    return;
  }
  showLoading(mount);
  try {
    const graph = await loadGraph(graphUrl);
    mountExplorer(mount, graph, {
      root: siteRoot(graphUrl),
      center: mount.dataset.center ?? "",
    });
  } catch (err) {
    showError(mount, err instanceof Error ? err.message : String(err));
  }
}

/* c8 ignore start */
if (typeof document !== "undefined") {
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", () => {
      void boot(document);
    });
  } else {
    void boot(document);
  }
}
/* c8 ignore stop */
