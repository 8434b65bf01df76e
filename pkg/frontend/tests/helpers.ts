/** Test doubles: an instrumented ApiClient backed by the generator
 * fixture (dumped from the real service by scripts/make_fixtures.py),
 * plus a synthetic variant for grid-scale tests. */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { ApiError, type ApiClient } from '../src/api.js';
import type {
  ColumnDesc,
  CursorState,
  FilterSpec,
  Marker,
  Project,
  RowView,
  VideoMeta,
} from '../src/types.js';
import { effectiveStartMs } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));

export interface Fixture {
  project: Project;
  rows: RowView[];
  total: number;
  schema: Record<string, ColumnDesc[]>;
  markersNotification: Marker[];
  markersAll: Marker[];
  distinctPackageName: string[];
  truth: {
    params: Record<string, string>;
    metrics: Record<string, number | number[][]>;
  };
}

export function loadFixture(): Fixture {
  const raw = readFileSync(join(here, 'fixtures', 'send_sms_project.json'), 'utf8');
  return JSON.parse(raw) as Fixture;
}

function matches(pred: { matchKind: string; operands: string[] }, value: string): boolean {
  if (pred.matchKind === 'equals') return value === pred.operands[0];
  if (pred.matchKind === 'oneOf') return pred.operands.includes(value);
  return value.toLowerCase().includes(pred.operands[0].toLowerCase());
}

function applyFilter(rows: RowView[], filter: FilterSpec | null): RowView[] {
  if (!filter) return rows;
  return rows.filter((row) => {
    if (!filter.includedDatumTypes.includes(row.datumType)) return false;
    for (const pred of filter.valuePredicates) {
      const value = row.cells[pred.column];
      if (value === undefined) continue; // vacuously true
      if (!matches(pred, value)) return false;
    }
    return true;
  });
}

export class FakeApiClient implements ApiClient {
  calls = {
    recordAt: 0,
    videoTime: 0,
    locate: 0,
    rows: 0,
    putProject: 0,
    markers: 0,
    distinct: 0,
    cursor: 0,
  };
  project: Project;
  revision = 'rev-1';
  private revisionCounter = 1;

  constructor(public fixture: Fixture) {
    this.project = JSON.parse(JSON.stringify(fixture.project)) as Project;
  }

  private video(videoId: string): VideoMeta {
    const video = this.project.videos.find((v) => v.videoId === videoId);
    if (!video) throw new ApiError(404, { error: 'UnknownVideo' });
    return video;
  }

  async getProject(_projectId: string) {
    return { project: this.project, revision: this.revision, staleSource: false };
  }

  async putProject(_projectId: string, project: Project, revision: string) {
    this.calls.putProject += 1;
    if (revision !== this.revision) throw new ApiError(409, { error: 'ConflictingRevision' });
    this.project = JSON.parse(JSON.stringify(project)) as Project;
    this.revision = `rev-${++this.revisionCounter}`;
    return { project: this.project, revision: this.revision };
  }

  async getRows(_projectId: string, offset: number, limit: number, filter: FilterSpec | null) {
    this.calls.rows += 1;
    const filtered = applyFilter(this.fixture.rows, filter);
    return {
      total: filtered.length,
      offset,
      limit,
      datasetDigest: 'fixture',
      rows: filtered.slice(offset, offset + limit),
    };
  }

  async locateRow(_projectId: string, recordId: number, filter: FilterSpec | null) {
    this.calls.locate += 1;
    const filtered = applyFilter(this.fixture.rows, filter);
    let best: { position: number; recordId: number } | null = null;
    filtered.forEach((row, position) => {
      if (row.recordId <= recordId) best = { position, recordId: row.recordId };
    });
    if (best === null) return { position: null, recordId: null, exact: false };
    const hit = best as { position: number; recordId: number };
    return { position: hit.position, recordId: hit.recordId, exact: hit.recordId === recordId };
  }

  async getSchema(_projectId: string) {
    return this.fixture.schema;
  }

  async getDistinct(_projectId: string, column: string, _datumTypes: string[]) {
    this.calls.distinct += 1;
    if (column === 'packageName') return this.fixture.distinctPackageName;
    const values = new Set<string>();
    for (const row of this.fixture.rows) {
      const v = row.cells[column];
      if (v !== undefined) values.add(v);
    }
    return [...values].sort();
  }

  async recordAt(_projectId: string, videoId: string, tVidMs: number) {
    this.calls.recordAt += 1;
    const video = this.video(videoId);
    if (tVidMs < 0 || tVidMs >= video.durationMs) {
      throw new ApiError(400, { error: 'OutOfVideoRange' });
    }
    const tLog = tVidMs + effectiveStartMs(video);
    let hit: RowView | null = null;
    for (const row of this.fixture.rows) {
      if (row.timestampMs <= tLog) hit = row;
    }
    return hit
      ? { recordId: hit.recordId, timestampMs: hit.timestampMs }
      : { recordId: null, timestampMs: null };
  }

  async videoTime(_projectId: string, videoId: string, recordId: number) {
    this.calls.videoTime += 1;
    const video = this.video(videoId);
    const row = this.fixture.rows.find((r) => r.recordId === recordId);
    if (!row) throw new ApiError(404, { error: 'UnknownRecord' });
    const ms = row.timestampMs - effectiveStartMs(video);
    return { videoTimeMs: ms, inRange: ms >= 0 && ms < video.durationMs };
  }

  async getMarkers(_projectId: string, _videoId: string, datumTypes: string[] | null) {
    this.calls.markers += 1;
    if (!datumTypes) return this.fixture.markersAll;
    return this.fixture.markersAll.filter((m) => datumTypes.includes(m.datumType));
  }

  async postCursor(
    projectId: string,
    cursor: Partial<CursorState> & { origin: 'video' | 'log' },
  ): Promise<CursorState> {
    this.calls.cursor += 1;
    return {
      projectId,
      origin: cursor.origin,
      videoId: cursor.videoId ?? null,
      videoTimeMs: cursor.videoTimeMs ?? null,
      highlightedRecordId: cursor.recordId ?? null,
      playing: cursor.playing ?? false,
    } as CursorState;
  }

  mediaUrl(projectId: string, videoId: string) {
    return `fake://media/${projectId}/${videoId}`;
  }

  taskSheetExportUrl(projectId: string) {
    return `fake://export/${projectId}`;
  }
}

/** Rows generated on demand; for virtualization tests at 10^5 rows. */
export class SyntheticRowsApi extends FakeApiClient {
  constructor(public rowCount: number) {
    const fixture = loadFixture();
    super(fixture);
  }

  private row(i: number): RowView {
    return {
      recordId: i,
      timestampMs: 1_000_000 + i * 50,
      datumType: 'KEY_LOG',
      cells: {
        timestamp: String(1_000_000 + i * 50),
        datumType: 'KEY_LOG',
        currentKey: 'k',
        timeTaken: '50',
        name: 'App',
        packageName: `com.app.p${i % 7}`,
      },
    };
  }

  async getRows(_projectId: string, offset: number, limit: number, _filter: FilterSpec | null) {
    this.calls.rows += 1;
    const rows: RowView[] = [];
    for (let i = offset; i < Math.min(offset + limit, this.rowCount); i++) {
      rows.push(this.row(i));
    }
    return { total: this.rowCount, offset, limit, datasetDigest: 'synthetic', rows };
  }

  async locateRow(_projectId: string, recordId: number, _filter: FilterSpec | null) {
    this.calls.locate += 1;
    if (recordId < 0) return { position: null, recordId: null, exact: false };
    const clamped = Math.min(recordId, this.rowCount - 1);
    return { position: clamped, recordId: clamped, exact: clamped === recordId };
  }
}

/** Recording ports for LinkController tests. */
export class RecordingGrid {
  highlights: (number | null)[] = [];
  highlightRecord(recordId: number | null) {
    this.highlights.push(recordId);
  }
}

export class RecordingPlayer {
  seeks: number[] = [];
  pauses = 0;
  playing = false;
  private duration: number;
  constructor(durationMs = 360_000) {
    this.duration = durationMs;
  }
  seekTo(t: number) {
    this.seeks.push(t);
  }
  pause() {
    this.pauses += 1;
    this.playing = false;
  }
  isPlaying() {
    return this.playing;
  }
  durationMs() {
    return this.duration;
  }
}

export class RecordingNotices {
  messages: string[] = [];
  notice(text: string) {
    this.messages.push(text);
  }
}
