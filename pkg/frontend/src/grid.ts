/** Virtualized log grid: spreadsheet view over the paged rows API.
 *
 * Only the visible window of rows exists in the DOM; a spacer div
 * provides true scroll height, so a 10^5-row dataset scrolls like a
 * short list. Highlight (link-driven) and selection (user click) are
 * separate visual states: scrubbing the video must not destroy the
 * row the analyst is working with.
 */

import type { ApiClient } from './api.js';
import type { FilterSpec, RowView } from './types.js';

export const ROW_HEIGHT_PX = 24;

/** Pure scroll window math; bijective between row index and scrollTop. */
export class GridWindow {
  constructor(
    public rowHeightPx: number,
    public viewportHeightPx: number,
  ) {}

  firstVisibleRow(scrollTop: number): number {
    return Math.floor(scrollTop / this.rowHeightPx);
  }

  scrollTopForRow(row: number): number {
    return row * this.rowHeightPx;
  }

  visibleRowCount(): number {
    return Math.ceil(this.viewportHeightPx / this.rowHeightPx) + 1;
  }

  /** Window [first, lastExclusive) with a little overscan. */
  windowFor(scrollTop: number, totalRows: number, overscan = 5): [number, number] {
    const first = Math.max(0, this.firstVisibleRow(scrollTop) - overscan);
    const last = Math.min(totalRows, first + this.visibleRowCount() + 2 * overscan);
    return [first, last];
  }
}

const PAGE_SIZE = 200;

/** Page-cached access to the filtered row view. */
export class RowSource {
  private pages = new Map<number, RowView[]>();
  private inFlight = new Map<number, Promise<RowView[]>>();
  total = 0;

  constructor(
    private api: ApiClient,
    private projectId: string,
    public filter: FilterSpec | null,
  ) {}

  async init(): Promise<void> {
    await this.fetchPage(0);
  }

  setFilter(filter: FilterSpec | null): void {
    this.filter = filter;
    this.pages.clear();
    this.inFlight.clear();
  }

  private fetchPage(pageIndex: number): Promise<RowView[]> {
    const cached = this.pages.get(pageIndex);
    if (cached) return Promise.resolve(cached);
    let pending = this.inFlight.get(pageIndex);
    if (!pending) {
      pending = this.api
        .getRows(this.projectId, pageIndex * PAGE_SIZE, PAGE_SIZE, this.filter)
        .then((page) => {
          this.total = page.total;
          this.pages.set(pageIndex, page.rows);
          this.inFlight.delete(pageIndex);
          return page.rows;
        });
      this.inFlight.set(pageIndex, pending);
    }
    return pending;
  }

  async rowsInRange(first: number, lastExclusive: number): Promise<(RowView | undefined)[]> {
    const firstPage = Math.floor(first / PAGE_SIZE);
    const lastPage = Math.floor(Math.max(first, lastExclusive - 1) / PAGE_SIZE);
    const pages: RowView[][] = [];
    for (let p = firstPage; p <= lastPage; p++) {
      pages.push(await this.fetchPage(p));
    }
    const out: (RowView | undefined)[] = [];
    for (let pos = first; pos < lastExclusive; pos++) {
      const page = pages[Math.floor(pos / PAGE_SIZE) - firstPage];
      out.push(page[pos % PAGE_SIZE]);
    }
    return out;
  }

  locate(recordId: number) {
    return this.api.locateRow(this.projectId, recordId, this.filter);
  }
}

export interface GridEvents {
  onRowSelect(recordId: number): void;
  notice(text: string): void;
}

export class VirtualGrid {
  readonly viewport: HTMLElement;
  private spacer: HTMLElement;
  private windowEl: HTMLElement;
  private headerEl: HTMLElement;
  private geom: GridWindow;
  private columns: string[] = [];
  private highlightedPosition: number | null = null;
  highlightedRecordId: number | null = null;
  selectedRecordId: number | null = null;

  constructor(
    root: HTMLElement,
    private source: RowSource,
    private events: GridEvents,
    viewportHeightPx = 480,
  ) {
    root.classList.add('log-grid');
    this.headerEl = document.createElement('div');
    this.headerEl.className = 'grid-header';
    this.viewport = document.createElement('div');
    this.viewport.className = 'grid-viewport';
    this.viewport.style.height = `${viewportHeightPx}px`;
    this.viewport.style.overflowY = 'auto';
    this.viewport.style.position = 'relative';
    this.spacer = document.createElement('div');
    this.windowEl = document.createElement('div');
    this.windowEl.style.position = 'absolute';
    this.windowEl.style.left = '0';
    this.windowEl.style.right = '0';
    this.viewport.append(this.spacer, this.windowEl);
    root.append(this.headerEl, this.viewport);
    this.geom = new GridWindow(ROW_HEIGHT_PX, viewportHeightPx);
    this.viewport.addEventListener('scroll', () => {
      void this.render();
    });
  }

  setColumns(columns: string[]): void {
    this.columns = columns;
    this.headerEl.textContent = '';
    for (const name of ['#', ...columns]) {
      const cell = document.createElement('span');
      cell.className = 'grid-cell grid-head-cell';
      cell.textContent = name;
      this.headerEl.appendChild(cell);
    }
  }

  async refresh(): Promise<void> {
    this.highlightedPosition = null;
    this.highlightedRecordId = null;
    await this.source.init();
    await this.render();
  }

  async render(): Promise<void> {
    const total = this.source.total;
    this.spacer.style.height = `${total * ROW_HEIGHT_PX}px`;
    const [first, last] = this.geom.windowFor(this.viewport.scrollTop, total);
    const rows = await this.source.rowsInRange(first, last);
    this.windowEl.style.top = `${first * ROW_HEIGHT_PX}px`;
    this.windowEl.textContent = '';
    rows.forEach((row, i) => {
      const pos = first + i;
      const el = document.createElement('div');
      el.className = 'grid-row';
      el.style.height = `${ROW_HEIGHT_PX}px`;
      if (row) {
        el.dataset.recordId = String(row.recordId);
        el.dataset.position = String(pos);
        if (pos === this.highlightedPosition) el.classList.add('is-highlighted');
        if (row.recordId === this.selectedRecordId) el.classList.add('is-selected');
        const idCell = document.createElement('span');
        idCell.className = 'grid-cell grid-id-cell';
        idCell.textContent = String(row.recordId);
        el.appendChild(idCell);
        for (const col of this.columns) {
          const cell = document.createElement('span');
          cell.className = 'grid-cell';
          cell.textContent = row.cells[col] ?? '';
          el.appendChild(cell);
        }
        el.addEventListener('click', () => {
          this.selectedRecordId = row.recordId;
          void this.render();
          this.events.onRowSelect(row.recordId);
        });
      }
      this.windowEl.appendChild(el);
    });
  }

  /** Link-driven highlight: finds the row in the (possibly filtered)
   * view, falling back to the nearest prior visible row, scrolls it
   * into view, and re-renders. */
  async highlightRecord(recordId: number | null): Promise<void> {
    if (recordId === null) {
      this.highlightedPosition = null;
      this.highlightedRecordId = null;
      await this.render();
      return;
    }
    const located = await this.source.locate(recordId);
    if (located.position === null || located.recordId === null) {
      this.highlightedPosition = null;
      this.highlightedRecordId = null;
      this.events.notice('matching record is hidden by the current filter');
      await this.render();
      return;
    }
    if (!located.exact) {
      this.events.notice('exact record is filtered out; showing nearest prior row');
    }
    this.highlightedPosition = located.position;
    this.highlightedRecordId = located.recordId;
    this.ensureVisible(located.position);
    await this.render();
  }

  ensureVisible(position: number): void {
    const top = this.geom.scrollTopForRow(position);
    const viewTop = this.viewport.scrollTop;
    const viewBottom = viewTop + this.geom.viewportHeightPx - ROW_HEIGHT_PX;
    if (top < viewTop || top > viewBottom) {
      this.viewport.scrollTop = Math.max(0, top - this.geom.viewportHeightPx / 2);
    }
  }
}
