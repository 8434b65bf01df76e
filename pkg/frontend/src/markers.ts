/** Seek-bar marker layout and rendering.
 *
 * Ticks sit on the progress bar at the video-time of each log event,
 * color-coded by datum type; hovering shows the event summary and
 * clicking is the same path as any other seek.
 */

import type { Marker } from './types.js';

export function markerLeftPx(videoTimeMs: number, durationMs: number, barWidthPx: number): number {
  return (videoTimeMs / durationMs) * barWidthPx;
}

const MARKER_COLORS: Record<string, string> = {
  NOTIFICATION: '#e4a11b',
  KEY_LOG: '#3b82d6',
  APP_USAGE_EVENT: '#2fa36b',
};

export function markerColor(datumType: string): string {
  return MARKER_COLORS[datumType] ?? '#8a8a8a';
}

export function renderMarkerOverlay(
  overlay: HTMLElement,
  markers: Marker[],
  durationMs: number,
  barWidthPx: number,
  onClick: (marker: Marker) => void,
): void {
  overlay.textContent = '';
  for (const marker of markers) {
    if (marker.videoTimeMs < 0 || marker.videoTimeMs >= durationMs) continue;
    const tick = document.createElement('span');
    tick.className = 'seek-marker';
    tick.dataset.recordId = String(marker.recordId);
    tick.dataset.datumType = marker.datumType;
    tick.style.left = `${markerLeftPx(marker.videoTimeMs, durationMs, barWidthPx)}px`;
    tick.style.background = markerColor(marker.datumType);
    tick.title = marker.label; // hover summary
    tick.addEventListener('click', (ev) => {
      ev.stopPropagation();
      onClick(marker);
    });
    overlay.appendChild(tick);
  }
}
