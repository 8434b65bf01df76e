/** Workbench shell: wires the grid, player, video dropdown, link
 * toggle, filter panel, and task sheet together around one project.
 *
 * Layout mirrors the classic two-pane log/video workbench: the log
 * viewer on the left, the player with its marker-decorated seek bar on
 * the right, the task sheet and filter panel alongside.
 */

import type { ApiClient } from './api.js';
import { LinkController } from './link.js';
import { RowSource, VirtualGrid } from './grid.js';
import { VideoPanel } from './player.js';
import { FilterPanel } from './filterPanel.js';
import { TaskSheetPane, withAnswer } from './taskSheet.js';
import type { FilterSpec, Marker, Project, VideoMeta } from './types.js';

export class Notices {
  constructor(private el: HTMLElement) {}

  notice(text: string): void {
    const item = document.createElement('div');
    item.className = 'notice';
    item.textContent = text;
    this.el.appendChild(item);
    setTimeout(() => item.remove(), 4000);
  }
}

export class App {
  project!: Project;
  revision!: string;
  grid!: VirtualGrid;
  player!: VideoPanel;
  link!: LinkController;
  filterPanel!: FilterPanel;
  taskSheet!: TaskSheetPane;
  notices!: Notices;
  private rowSource!: RowSource;
  private dropdown!: HTMLSelectElement;
  private toggle!: HTMLInputElement;
  private autoPauseCheck!: HTMLInputElement;
  private markerTypeSelect!: HTMLSelectElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private projectId: string,
  ) {}

  async start(): Promise<void> {
    const { project, revision } = await this.api.getProject(this.projectId);
    this.project = project;
    this.revision = revision;
    this.root.innerHTML = `
      <header class="top-bar">
        <span class="project-name"></span>
        <label class="video-select-label">Video
          <select class="video-select" title="video selection"></select>
        </label>
        <label class="link-toggle-label">
          <input type="checkbox" class="link-toggle"> linked
        </label>
        <label class="auto-pause-label">
          <input type="checkbox" class="auto-pause"> pause video on row select
        </label>
        <label class="marker-types-label">Markers
          <select class="marker-types">
            <option value="NOTIFICATION">notifications</option>
            <option value="APP_USAGE_EVENT">app usage</option>
            <option value="KEY_LOG">key log</option>
            <option value="">all</option>
          </select>
        </label>
      </header>
      <div class="notices"></div>
      <main class="panes">
        <section class="grid-pane"></section>
        <section class="video-pane"></section>
      </main>
      <aside class="side-panes">
        <section class="filter-pane"></section>
        <section class="task-pane"></section>
      </aside>
    `;
    (this.root.querySelector('.project-name') as HTMLElement).textContent = project.name;
    this.notices = new Notices(this.root.querySelector('.notices') as HTMLElement);

    this.player = new VideoPanel(this.root.querySelector('.video-pane') as HTMLElement, {
      onSeek: (t) => void this.link.onVideoSeek(t),
    });

    this.rowSource = new RowSource(this.api, this.projectId, project.filterSpec);
    this.grid = new VirtualGrid(
      this.root.querySelector('.grid-pane') as HTMLElement,
      this.rowSource,
      {
        onRowSelect: (recordId) => void this.link.onRowSelect(recordId),
        notice: (text) => this.notices.notice(text),
      },
    );

    this.link = new LinkController(this.api, this.projectId, this.grid, this.player, this.notices);
    this.link.linked = project.linked;

    this.toggle = this.root.querySelector('.link-toggle') as HTMLInputElement;
    this.toggle.checked = project.linked;
    this.toggle.addEventListener('change', () => {
      void this.setLinked(this.toggle.checked);
    });

    this.autoPauseCheck = this.root.querySelector('.auto-pause') as HTMLInputElement;
    this.autoPauseCheck.checked = false;
    this.autoPauseCheck.addEventListener('change', () => {
      this.link.autoPause = this.autoPauseCheck.checked;
    });

    this.dropdown = this.root.querySelector('.video-select') as HTMLSelectElement;
    for (const video of project.videos) {
      const opt = document.createElement('option');
      opt.value = video.videoId;
      opt.textContent = video.title;
      this.dropdown.appendChild(opt);
    }
    this.dropdown.addEventListener('change', () => {
      void this.selectVideo(this.dropdown.value);
    });

    this.markerTypeSelect = this.root.querySelector('.marker-types') as HTMLSelectElement;
    this.markerTypeSelect.addEventListener('change', () => {
      void this.refreshMarkers();
    });

    this.filterPanel = new FilterPanel(
      this.root.querySelector('.filter-pane') as HTMLElement,
      this.api,
      this.projectId,
      (spec) => void this.applyFilter(spec),
    );
    await this.filterPanel.init();

    this.taskSheet = new TaskSheetPane(this.root.querySelector('.task-pane') as HTMLElement, {
      onAnswerChanged: (taskId, answer) => void this.saveAnswer(taskId, answer),
      exportCsv: () => this.openExport(),
    });
    this.taskSheet.render(project.taskSheet);

    const schema = await this.api.getSchema(this.projectId);
    const columns: string[] = [];
    for (const descs of Object.values(schema)) {
      for (const c of descs) if (!columns.includes(c.name)) columns.push(c.name);
    }
    this.grid.setColumns(columns);
    await this.grid.refresh();

    const initial = project.activeVideoId ?? project.videos[0]?.videoId ?? null;
    if (initial) {
      this.dropdown.value = initial;
      await this.selectVideo(initial);
    }
    this.subscribeCursorChannel();
  }

  currentVideo(): VideoMeta | null {
    return this.project.videos.find((v) => v.videoId === this.link.activeVideoId) ?? null;
  }

  async selectVideo(videoId: string): Promise<void> {
    const video = this.project.videos.find((v) => v.videoId === videoId);
    if (!video) return;
    this.link.activeVideoId = videoId;
    const hasMedia = !video.uri.startsWith('placeholder://');
    this.player.load(video, hasMedia ? this.api.mediaUrl(this.projectId, videoId) : null);
    await this.refreshMarkers();
  }

  async refreshMarkers(): Promise<void> {
    if (!this.link.activeVideoId) return;
    const wanted = this.markerTypeSelect.value;
    let markers: Marker[];
    try {
      markers = await this.api.getMarkers(
        this.projectId,
        this.link.activeVideoId,
        wanted ? [wanted] : null,
      );
    } catch {
      markers = [];
    }
    this.player.setMarkers(markers);
  }

  async setLinked(linked: boolean): Promise<void> {
    this.link.linked = linked;
    this.project = { ...this.project, linked };
    try {
      const saved = await this.api.putProject(this.projectId, this.project, this.revision);
      this.project = saved.project;
      this.revision = saved.revision;
    } catch {
      this.notices.notice('could not persist link state');
    }
  }

  async applyFilter(spec: FilterSpec): Promise<void> {
    this.rowSource.setFilter(spec);
    this.project = { ...this.project, filterSpec: spec };
    await this.grid.refresh();
    try {
      const saved = await this.api.putProject(this.projectId, this.project, this.revision);
      this.project = saved.project;
      this.revision = saved.revision;
    } catch {
      this.notices.notice('filter applied locally; could not persist it');
    }
  }

  async saveAnswer(taskId: string, answer: string): Promise<void> {
    this.project = withAnswer(this.project, taskId, answer);
    try {
      const saved = await this.api.putProject(this.projectId, this.project, this.revision);
      this.project = saved.project;
      this.revision = saved.revision;
    } catch {
      this.notices.notice('could not save the answer');
    }
  }

  openExport(): void {
    const url = this.api.taskSheetExportUrl(this.projectId);
    if (typeof window !== 'undefined' && typeof window.open === 'function') {
      window.open(url, '_blank');
    }
  }

  /** Server-push cursor states (e.g. a second window scrubbing). */
  private subscribeCursorChannel(): void {
    if (typeof EventSource === 'undefined') return;
    const source = new EventSource(`/projects/${this.projectId}/events`);
    source.onmessage = (ev) => {
      if (!this.link.linked) return;
      try {
        const state = JSON.parse(ev.data);
        if (state.origin === 'video' && typeof state.highlightedRecordId === 'number') {
          void this.grid.highlightRecord(state.highlightedRecordId);
        }
      } catch {
        /* malformed frame; ignore */
      }
    };
  }
}
