import type { SchemaSummary, TreeDoc, TreeNode } from "./types.js";

export interface TreeHandlers {
  onPrune(nodeId: string): void;
  onRespider(nodeId: string): void;
}

/**
 * Render the spider tree as an indented collapsible list.
 *
 * The DOM mirrors the server document exactly: one entry per node in the
 * payload, children in payload order, no client-side node synthesis.
 */
export function renderTree(doc: TreeDoc, handlers: TreeHandlers): HTMLElement {
  const byId = new Map<string, TreeNode>(doc.nodes.map((n) => [n.id, n]));

  function renderNode(id: string, label: string | null): HTMLLIElement {
    const node = byId.get(id);
    if (!node) throw new Error(`server payload references unknown node ${id}`);
    const li = document.createElement("li");
    li.className = "tree-node";
    li.dataset.nodeId = node.id;
    li.dataset.nodeType = node.type;

    const row = document.createElement("div");
    row.className = "node-row";

    if (node.children.length > 0) {
      const toggle = document.createElement("button");
      toggle.className = "toggle";
      toggle.textContent = "▾";
      toggle.addEventListener("click", () => {
        const sub = li.querySelector(":scope > ul");
        if (!(sub instanceof HTMLElement)) return;
        const hidden = sub.style.display === "none";
        sub.style.display = hidden ? "" : "none";
        toggle.textContent = hidden ? "▾" : "▸";
      });
      row.appendChild(toggle);
    }

    if (label !== null) {
      const tag = document.createElement("span");
      tag.className = "edge-label";
      tag.textContent = `[${label}]`;
      row.appendChild(tag);
    }

    const name = document.createElement("span");
    name.className = "node-name";
    name.textContent = `${node.id} ${node.type}`;
    row.appendChild(name);

    const weight = document.createElement("span");
    weight.className = "node-weight";
    weight.textContent = `w=${node.weight}`;
    row.appendChild(weight);

    if (node.extendable) {
      const spider = document.createElement("button");
      spider.className = "spider-button";
      spider.textContent = "\u{1f577}";
      spider.title = "extend from this node";
      spider.addEventListener("click", () => handlers.onRespider(node.id));
      row.appendChild(spider);
    }

    if (node.id !== doc.root) {
      const del = document.createElement("button");
      del.className = "delete-button";
      del.textContent = "×";
      del.title = "delete this branch";
      del.addEventListener("click", () => handlers.onPrune(node.id));
      row.appendChild(del);
    }

    li.appendChild(row);

    if (node.children.length > 0) {
      const sub = document.createElement("ul");
      sub.className = "tree-children";
      for (const [edgeLabel, childId] of node.children) {
        sub.appendChild(renderNode(childId, edgeLabel));
      }
      li.appendChild(sub);
    }
    return li;
  }

  const rootList = document.createElement("ul");
  rootList.className = "tree-root";
  rootList.appendChild(renderNode(doc.root, null));
  return rootList;
}

export function renderSchemaList(
  schemas: SchemaSummary[],
  onPick: (schemaId: string, rootType: string) => void,
): HTMLElement {
  const box = document.createElement("div");
  box.className = "schema-list";
  if (schemas.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-hint";
    empty.textContent = "No schemas yet. Paste one below and add it.";
    box.appendChild(empty);
    return box;
  }
  for (const schema of schemas) {
    const row = document.createElement("div");
    row.className = "schema-row";
    row.dataset.schemaId = schema.id;

    const name = document.createElement("span");
    name.className = "schema-id";
    name.textContent = schema.id;
    row.appendChild(name);

    const select = document.createElement("select");
    select.className = "root-select";
    for (const t of schema.types) {
      const opt = document.createElement("option");
      opt.value = t;
      opt.textContent = schema.obj_types.includes(t) ? t : `${t} (relationship)`;
      select.appendChild(opt);
    }
    row.appendChild(select);

    const start = document.createElement("button");
    start.className = "start-button";
    start.textContent = "Spider";
    start.addEventListener("click", () => onPick(schema.id, select.value));
    row.appendChild(start);

    box.appendChild(row);
  }
  return box;
}

/** Placeholder controls for the query modes this client does not offer. */
export function renderModeSwitches(): HTMLElement {
  const box = document.createElement("div");
  box.className = "mode-switches";
  for (const mode of ["query by navigation", "point to point"]) {
    const btn = document.createElement("button");
    btn.textContent = mode;
    btn.disabled = true;
    btn.title = "not available in this client";
    box.appendChild(btn);
  }
  return box;
}

/** Walk a rendered tree and report every node id it contains. */
export function renderedNodeIds(tree: HTMLElement): string[] {
  return Array.from(tree.querySelectorAll("li.tree-node")).map(
    (li) => (li as HTMLElement).dataset.nodeId ?? "",
  );
}
