export interface SchemaSummary {
  id: string;
  types: string[];
  obj_types: string[];
}

export interface TreeNode {
  id: string;
  type: string;
  weight: string;
  children: [string, string][]; // [label, child id]
  extendable: boolean;
}

export interface TreeDoc {
  root: string;
  nodes: TreeNode[];
}

export interface LogEntry {
  op: string;
  root?: string;
  node?: string;
  at: string;
}

export interface SessionView {
  id: string;
  schema_id: string;
  root_type: string;
  tree: TreeDoc;
  expression: string;
  verbalization: string;
  log: LogEntry[];
  created: string;
  updated: string;
}

export interface ExpressionView {
  session_id: string;
  format: string;
  value: string | TreeDoc;
}
