/** Wire types mirroring the workbench HTTP API. */

export interface VideoMeta {
  videoId: string;
  uri: string;
  title: string;
  startEpochMs: number;
  durationMs: number;
  syncOffsetMs: number;
}

export interface TaskItem {
  taskId: string;
  prompt: string;
  answer: string;
  answeredAt: number | null;
}

export interface FilterPredicate {
  column: string;
  matchKind: 'equals' | 'oneOf' | 'contains';
  operands: string[];
}

export interface FilterSpec {
  includedDatumTypes: string[];
  visibleColumns: Record<string, string[]>;
  valuePredicates: FilterPredicate[];
}

export interface Project {
  projectId: string;
  name: string;
  logSourcePath: string | null;
  sourceDigest: string | null;
  videos: VideoMeta[];
  activeVideoId: string | null;
  linked: boolean;
  filterSpec: FilterSpec | null;
  taskSheet: TaskItem[];
  createdAt: number;
  updatedAt: number;
}

export interface RowView {
  recordId: number;
  timestampMs: number;
  datumType: string;
  cells: Record<string, string>;
}

export interface RowsPage {
  total: number;
  offset: number;
  limit: number;
  datasetDigest: string;
  rows: RowView[];
}

export interface LocateResult {
  position: number | null;
  recordId: number | null;
  exact: boolean;
}

export interface RecordAtResult {
  recordId: number | null;
  timestampMs: number | null;
}

export interface MappedTime {
  videoTimeMs: number;
  inRange: boolean;
}

export interface Marker {
  recordId: number;
  videoTimeMs: number;
  datumType: string;
  label: string;
}

export interface ColumnDesc {
  name: string;
  kind: string;
}

export interface CursorState {
  projectId: string;
  origin: 'video' | 'log';
  videoId: string | null;
  videoTimeMs: number | null;
  highlightedRecordId: number | null;
  playing: boolean;
}

export function effectiveStartMs(video: VideoMeta): number {
  return video.startEpochMs + video.syncOffsetMs;
}
