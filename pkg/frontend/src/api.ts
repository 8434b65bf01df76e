/** HTTP client for the workbench service.
 *
 * The UI talks to the backend exclusively through this interface; the
 * test suite substitutes an instrumented in-memory implementation.
 */

import type {
  ColumnDesc,
  CursorState,
  FilterSpec,
  LocateResult,
  MappedTime,
  Marker,
  Project,
  RecordAtResult,
  RowsPage,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: { error?: string; message?: string } & Record<string, unknown>,
  ) {
    super(body.message ?? `HTTP ${status}`);
  }
}

export interface ApiClient {
  getProject(projectId: string): Promise<{ project: Project; revision: string; staleSource: boolean }>;
  putProject(projectId: string, project: Project, revision: string): Promise<{ project: Project; revision: string }>;
  getRows(projectId: string, offset: number, limit: number, filter: FilterSpec | null): Promise<RowsPage>;
  locateRow(projectId: string, recordId: number, filter: FilterSpec | null): Promise<LocateResult>;
  getSchema(projectId: string): Promise<Record<string, ColumnDesc[]>>;
  getDistinct(projectId: string, column: string, datumTypes: string[]): Promise<string[]>;
  recordAt(projectId: string, videoId: string, tVidMs: number): Promise<RecordAtResult>;
  videoTime(projectId: string, videoId: string, recordId: number): Promise<MappedTime>;
  getMarkers(projectId: string, videoId: string, datumTypes: string[] | null): Promise<Marker[]>;
  postCursor(projectId: string, cursor: Partial<CursorState> & { origin: 'video' | 'log' }): Promise<CursorState>;
  mediaUrl(projectId: string, videoId: string): string;
  taskSheetExportUrl(projectId: string): string;
}

export class HttpApiClient implements ApiClient {
  constructor(private base: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    if (!res.ok) {
      let body: Record<string, unknown> = {};
      try {
        body = await res.json();
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, body);
    }
    return (await res.json()) as T;
  }

  getProject(projectId: string) {
    return this.request<{ project: Project; revision: string; staleSource: boolean }>(
      `/projects/${projectId}`,
    );
  }

  putProject(projectId: string, project: Project, revision: string) {
    return this.request<{ project: Project; revision: string }>(`/projects/${projectId}`, {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json', 'If-Match': revision },
      body: JSON.stringify(project),
    });
  }

  getRows(projectId: string, offset: number, limit: number, filter: FilterSpec | null) {
    const params = new URLSearchParams({ offset: String(offset), limit: String(limit) });
    if (filter) params.set('filter', JSON.stringify(filter));
    return this.request<RowsPage>(`/projects/${projectId}/rows?${params}`);
  }

  locateRow(projectId: string, recordId: number, filter: FilterSpec | null) {
    const params = new URLSearchParams({ recordId: String(recordId) });
    if (filter) params.set('filter', JSON.stringify(filter));
    return this.request<LocateResult>(`/projects/${projectId}/rows/locate?${params}`);
  }

  getSchema(projectId: string) {
    return this.request<Record<string, ColumnDesc[]>>(`/projects/${projectId}/schema`);
  }

  async getDistinct(projectId: string, column: string, datumTypes: string[]) {
    const params = new URLSearchParams({ column, datumTypes: datumTypes.join(',') });
    const body = await this.request<{ values: string[] }>(`/projects/${projectId}/distinct?${params}`);
    return body.values;
  }

  recordAt(projectId: string, videoId: string, tVidMs: number) {
    return this.request<RecordAtResult>(
      `/projects/${projectId}/videos/${videoId}/record-at?t=${tVidMs}`,
    );
  }

  videoTime(projectId: string, videoId: string, recordId: number) {
    return this.request<MappedTime>(
      `/projects/${projectId}/videos/${videoId}/video-time?recordId=${recordId}`,
    );
  }

  async getMarkers(projectId: string, videoId: string, datumTypes: string[] | null) {
    const params = datumTypes ? `?datumTypes=${datumTypes.join(',')}` : '';
    const body = await this.request<{ markers: Marker[] }>(
      `/projects/${projectId}/videos/${videoId}/markers${params}`,
    );
    return body.markers;
  }

  postCursor(projectId: string, cursor: Partial<CursorState> & { origin: 'video' | 'log' }) {
    return this.request<CursorState>(`/projects/${projectId}/cursor`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(cursor),
    });
  }

  mediaUrl(projectId: string, videoId: string) {
    return `${this.base}/projects/${projectId}/media/${videoId}`;
  }

  taskSheetExportUrl(projectId: string) {
    return `${this.base}/projects/${projectId}/export/task-sheet`;
  }
}
