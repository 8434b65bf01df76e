/** Seek-bar markers: positions must match the notification events
 * mapped through the time conversion, within +/-1 px on a 1000 px bar
 * over a six-minute video. */

import { describe, expect, it } from 'vitest';

import { markerColor, markerLeftPx, renderMarkerOverlay } from '../src/markers.js';
import { effectiveStartMs } from '../src/types.js';
import { loadFixture } from './helpers.js';

const BAR_PX = 1000;

describe('marker positions', () => {
  it('notification markers sit within 1px of the mapped event times', () => {
    const fixture = loadFixture();
    const video = fixture.project.videos[0];
    expect(video.durationMs).toBe(360_000); // six-minute session
    const effStart = effectiveStartMs(video);

    const notificationRows = fixture.rows.filter((r) => r.datumType === 'NOTIFICATION');
    expect(notificationRows.length).toBeGreaterThan(0);
    expect(fixture.markersNotification.length).toBe(notificationRows.length);

    for (const row of notificationRows) {
      const marker = fixture.markersNotification.find((m) => m.recordId === row.recordId);
      expect(marker).toBeDefined();
      // oracle: map the raw record timestamp ourselves
      const expectedPx = ((row.timestampMs - effStart) / video.durationMs) * BAR_PX;
      const actualPx = markerLeftPx(marker!.videoTimeMs, video.durationMs, BAR_PX);
      expect(Math.abs(actualPx - expectedPx)).toBeLessThanOrEqual(1);
    }
  });

  it('renders ticks at those pixel offsets with type colors and hover labels', () => {
    const fixture = loadFixture();
    const video = fixture.project.videos[0];
    const overlay = document.createElement('div');
    const clicks: number[] = [];
    renderMarkerOverlay(overlay, fixture.markersNotification, video.durationMs, BAR_PX, (m) =>
      clicks.push(m.videoTimeMs),
    );
    const ticks = [...overlay.querySelectorAll('.seek-marker')] as HTMLElement[];
    expect(ticks.length).toBe(fixture.markersNotification.length);
    for (const tick of ticks) {
      const marker = fixture.markersNotification.find(
        (m) => String(m.recordId) === tick.dataset.recordId,
      )!;
      const left = Number.parseFloat(tick.style.left);
      expect(Math.abs(left - markerLeftPx(marker.videoTimeMs, video.durationMs, BAR_PX))).toBeLessThanOrEqual(
        0.001,
      );
      expect(tick.title).toBe(marker.label);
      expect(tick.style.background).toBeTruthy();
    }
    // clicking a tick is the same path as a seek
    ticks[0].click();
    expect(clicks).toEqual([fixture.markersNotification[0].videoTimeMs]);
  });

  it('colors differ by datum type and unknown types get the fallback', () => {
    expect(markerColor('NOTIFICATION')).not.toBe(markerColor('KEY_LOG'));
    expect(markerColor('SOMETHING_ELSE')).toBe(markerColor('ANOTHER_THING'));
  });

  it('out-of-span markers are not rendered', () => {
    const overlay = document.createElement('div');
    renderMarkerOverlay(
      overlay,
      [
        { recordId: 1, videoTimeMs: -50, datumType: 'KEY_LOG', label: 'early' },
        { recordId: 2, videoTimeMs: 360_000, datumType: 'KEY_LOG', label: 'late' },
        { recordId: 3, videoTimeMs: 5, datumType: 'KEY_LOG', label: 'ok' },
      ],
      360_000,
      BAR_PX,
      () => undefined,
    );
    expect(overlay.querySelectorAll('.seek-marker')).toHaveLength(1);
  });
});
