/** Wire types for the /api/v1 endpoints and the versioned scene documents. */

export type Vec3 = [number, number, number];

export type GlyphKind =
  | "ClassBuilding"
  | "DataFileGlyph"
  | "BinaryGlyph"
  | "DistrictSlab"
  | "TableSlab";

export interface SceneMesh {
  id: string;
  glyph: GlyphKind;
  position: Vec3;
  dimensions: Vec3;
  color: number;
  palette: string;
  path: string;
  metrics: Record<string, number>;
  changed: boolean;
}

export interface AccessLine {
  table: string;
  artifact: string;
  from: Vec3;
  to: Vec3;
  statements: number;
}

export interface MoveArc {
  artifact: string;
  from: Vec3;
  to: Vec3;
  from_path: string;
  to_path: string;
}

export interface SceneCommit {
  ordinal: number;
  sha: string;
  author: string;
  timestamp: number;
  subject: string;
}

export interface SceneDocument {
  schema_version: number;
  commit: SceneCommit;
  meshes: SceneMesh[];
  access_lines: AccessLine[];
  arcs: MoveArc[];
  summary: {
    counts: Record<string, number>;
    warnings: string[];
  };
}

export interface ProjectRecord {
  project_id: string;
  url: string;
  branch: string;
  head: string;
  num_commits: number;
  analysis_timestamp: number;
  db_type: string;
  schema_version: number;
  status: "queued" | "running" | "done" | "failed";
  reason?: string;
}

export interface TimelineRow {
  ordinal: number;
  sha: string;
  timestamp: number;
  author: string;
  message: string;
  counts: { added: number; modified: number; deleted: number; moved: number };
}

export interface TimelineDocument {
  schema_version: number;
  commits: TimelineRow[];
}

export interface EntityVersion {
  ordinal: number;
  path: string;
  kind: string;
  change: string;
  metrics: Record<string, number>;
  degraded: boolean;
}

export interface EntityHistory {
  artifact: string;
  kind: string;
  first_path: string;
  birth: number;
  intervals: [number, number | null][];
  episodes: { path: string; start: number; end: number | null }[];
  moves: { ordinal: number; from: string; to: string }[];
  touched: number[];
  versions: EntityVersion[];
}
