/** Video panel: a <video> element when media exists, or a synthetic
 * timeline strip when it does not (generated fixtures ship placeholder
 * URIs). Both variants drive the same custom seek bar with marker
 * overlay, so seeking and highlighting behave identically either way.
 */

import type { Marker, VideoMeta } from './types.js';
import { renderMarkerOverlay } from './markers.js';

export const SEEK_BAR_WIDTH_PX = 1000;

export interface PlayerEvents {
  onSeek(videoTimeMs: number): void;
}

export class VideoPanel {
  readonly root: HTMLElement;
  private stage: HTMLElement;
  private media: HTMLVideoElement | null = null;
  private strip: HTMLElement | null = null;
  private thumb: HTMLElement | null = null;
  private bar: HTMLElement;
  private barFill: HTMLElement;
  private overlay: HTMLElement;
  private timeLabel: HTMLElement;
  private playButton: HTMLButtonElement;
  private video: VideoMeta | null = null;
  private syntheticTimeMs = 0;
  private syntheticPlaying = false;
  private ticker: ReturnType<typeof setInterval> | null = null;
  private markers: Marker[] = [];

  constructor(
    root: HTMLElement,
    private events: PlayerEvents,
  ) {
    this.root = root;
    root.classList.add('video-panel');
    const stage = document.createElement('div');
    stage.className = 'video-stage';
    root.appendChild(stage);

    const controls = document.createElement('div');
    controls.className = 'video-controls';
    this.playButton = document.createElement('button');
    this.playButton.className = 'play-button';
    this.playButton.textContent = 'Play';
    this.playButton.addEventListener('click', () => this.togglePlay());
    this.timeLabel = document.createElement('span');
    this.timeLabel.className = 'time-label';

    this.bar = document.createElement('div');
    this.bar.className = 'seek-bar';
    this.bar.style.width = `${SEEK_BAR_WIDTH_PX}px`;
    this.barFill = document.createElement('div');
    this.barFill.className = 'seek-bar-fill';
    this.overlay = document.createElement('div');
    this.overlay.className = 'seek-bar-overlay';
    this.bar.append(this.barFill, this.overlay);
    this.bar.addEventListener('click', (ev) => {
      if (!this.video) return;
      const rect = this.bar.getBoundingClientRect();
      const x = Math.min(Math.max(ev.clientX - rect.left, 0), SEEK_BAR_WIDTH_PX - 1);
      const t = Math.floor((x / SEEK_BAR_WIDTH_PX) * this.video.durationMs);
      this.seekTo(t);
      this.events.onSeek(t);
    });

    controls.append(this.playButton, this.timeLabel);
    root.append(this.bar, controls);
    this.stage = stage;
  }

  /** Swap in a video; mediaUrl null means "no local media". */
  load(video: VideoMeta, mediaUrl: string | null): void {
    this.video = video;
    this.stopTicker();
    this.syntheticTimeMs = 0;
    this.syntheticPlaying = false;
    this.stage.textContent = '';
    this.media = null;
    this.strip = null;
    if (mediaUrl) {
      const el = document.createElement('video');
      el.src = mediaUrl;
      el.preload = 'metadata';
      el.className = 'video-element';
      el.addEventListener('timeupdate', () => {
        this.updateBar();
        this.events.onSeek(this.currentTimeMs());
      });
      this.stage.appendChild(el);
      this.media = el;
    } else {
      // synthetic timeline strip stands in for missing media
      const strip = document.createElement('div');
      strip.className = 'timeline-strip';
      strip.title = `${video.title} (no media; synthetic timeline)`;
      const thumb = document.createElement('div');
      thumb.className = 'timeline-thumb';
      strip.appendChild(thumb);
      const label = document.createElement('div');
      label.className = 'timeline-label';
      label.textContent = `${video.title} — synthetic timeline (media unavailable)`;
      this.stage.append(strip, label);
      this.strip = strip;
      this.thumb = thumb;
    }
    this.updateBar();
    this.renderMarkers();
  }

  setMarkers(markers: Marker[]): void {
    this.markers = markers;
    this.renderMarkers();
  }

  private renderMarkers(): void {
    if (!this.video) return;
    renderMarkerOverlay(this.overlay, this.markers, this.video.durationMs, SEEK_BAR_WIDTH_PX, (m) => {
      this.seekTo(m.videoTimeMs);
      this.events.onSeek(m.videoTimeMs);
    });
  }

  durationMs(): number {
    return this.video?.durationMs ?? 0;
  }

  currentTimeMs(): number {
    if (this.media) return Math.floor(this.media.currentTime * 1000);
    return this.syntheticTimeMs;
  }

  seekTo(videoTimeMs: number): void {
    if (!this.video) return;
    const t = Math.max(0, Math.min(videoTimeMs, this.video.durationMs - 1));
    if (this.media) {
      this.media.currentTime = t / 1000;
    } else {
      this.syntheticTimeMs = t;
    }
    this.updateBar();
  }

  isPlaying(): boolean {
    if (this.media) return !this.media.paused;
    return this.syntheticPlaying;
  }

  pause(): void {
    if (this.media) {
      this.media.pause();
    }
    this.syntheticPlaying = false;
    this.stopTicker();
    this.playButton.textContent = 'Play';
  }

  play(): void {
    if (this.media) {
      void this.media.play();
    } else {
      this.syntheticPlaying = true;
      this.stopTicker();
      this.ticker = setInterval(() => {
        if (!this.video) return;
        this.syntheticTimeMs = Math.min(this.syntheticTimeMs + 100, this.video.durationMs - 1);
        this.updateBar();
        this.events.onSeek(this.syntheticTimeMs);
        if (this.syntheticTimeMs >= this.video.durationMs - 1) this.pause();
      }, 100);
    }
    this.playButton.textContent = 'Pause';
  }

  private togglePlay(): void {
    if (this.isPlaying()) this.pause();
    else this.play();
  }

  private stopTicker(): void {
    if (this.ticker !== null) {
      clearInterval(this.ticker);
      this.ticker = null;
    }
  }

  private updateBar(): void {
    if (!this.video) return;
    const frac = this.currentTimeMs() / this.video.durationMs;
    this.barFill.style.width = `${Math.min(frac, 1) * SEEK_BAR_WIDTH_PX}px`;
    if (this.thumb) {
      this.thumb.style.left = `${Math.min(frac, 1) * 100}%`;
    }
    const seconds = Math.floor(this.currentTimeMs() / 1000);
    const total = Math.floor(this.video.durationMs / 1000);
    this.timeLabel.textContent = `${fmt(seconds)} / ${fmt(total)}`;
  }
}

function fmt(totalSeconds: number): string {
  const m = Math.floor(totalSeconds / 60);
  const s = totalSeconds % 60;
  return `${m}:${String(s).padStart(2, '0')}`;
}
