/** Cross-highlighting between the video player and the log grid.
 *
 * While the link toggle is ON, a video seek queries the record visible
 * at that frame and highlights it, and selecting a log row seeks the
 * player to that record's frame. While OFF, neither direction sends
 * anything: the controller is the single choke point for cross
 * messages, which is what the instrumented tests count.
 *
 * In-flight seek lookups are cancelled by later ones (scrubbing fires
 * dozens of seeks; only the newest may win). Auto-pause is an opt-in
 * preference: when enabled, selecting a row during playback pauses the
 * player right after the seek.
 */

import type { ApiClient } from './api.js';
import { ApiError } from './api.js';

export interface GridPort {
  /** Highlight the row for a record (null clears); linked-driven. */
  highlightRecord(recordId: number | null): void | Promise<void>;
}

export interface PlayerPort {
  seekTo(videoTimeMs: number): void;
  pause(): void;
  isPlaying(): boolean;
  durationMs(): number;
}

export interface NoticePort {
  notice(text: string): void;
}

export class LinkController {
  linked = true;
  autoPause = false; // opt-in nicety, off by default
  private seekEpoch = 0;

  constructor(
    private api: ApiClient,
    private projectId: string,
    private grid: GridPort,
    private player: PlayerPort,
    private notices: NoticePort,
  ) {}

  activeVideoId: string | null = null;

  /** Video cursor moved (scrub, play tick, marker click). */
  async onVideoSeek(tVidMs: number): Promise<void> {
    if (!this.linked || this.activeVideoId === null) return;
    const epoch = ++this.seekEpoch;
    let result;
    try {
      result = await this.api.recordAt(this.projectId, this.activeVideoId, tVidMs);
    } catch (err) {
      if (epoch !== this.seekEpoch) return; // superseded while in flight
      if (err instanceof ApiError && err.body.error === 'OutOfVideoRange') {
        this.notices.notice('seek position is outside the video');
        return;
      }
      throw err;
    }
    if (epoch !== this.seekEpoch) return;
    if (result.recordId === null) {
      this.notices.notice('no log yet at this point in the video');
      await this.grid.highlightRecord(null);
      return;
    }
    await this.grid.highlightRecord(result.recordId);
  }

  /** User clicked a log row. */
  async onRowSelect(recordId: number): Promise<void> {
    if (!this.linked || this.activeVideoId === null) return;
    const mapped = await this.api.videoTime(this.projectId, this.activeVideoId, recordId);
    let target = mapped.videoTimeMs;
    if (!mapped.inRange) {
      target = Math.max(0, Math.min(target, this.player.durationMs() - 1));
      this.notices.notice('record is outside this video; seeked to the nearest edge');
    }
    const wasPlaying = this.player.isPlaying();
    this.player.seekTo(target);
    if (this.autoPause && wasPlaying) {
      this.player.pause();
    }
  }
}
