/** Embedded task sheet: answer cells sit next to the data so results
 * can be pasted in without leaving the workbench, then exported as
 * CSV. Edits save on blur through the project document. */

import type { Project, TaskItem } from './types.js';

export interface TaskSheetEvents {
  onAnswerChanged(taskId: string, answer: string): void;
  exportCsv(): void;
}

export class TaskSheetPane {
  private listEl: HTMLElement;

  constructor(
    root: HTMLElement,
    private events: TaskSheetEvents,
  ) {
    root.classList.add('task-sheet');
    const title = document.createElement('h3');
    title.textContent = 'Task sheet';
    const exportButton = document.createElement('button');
    exportButton.className = 'task-export';
    exportButton.textContent = 'Export CSV';
    exportButton.addEventListener('click', () => this.events.exportCsv());
    this.listEl = document.createElement('div');
    this.listEl.className = 'task-list';
    root.append(title, this.listEl, exportButton);
  }

  render(items: TaskItem[]): void {
    this.listEl.textContent = '';
    for (const item of items) {
      const row = document.createElement('div');
      row.className = 'task-row';
      const prompt = document.createElement('div');
      prompt.className = 'task-prompt';
      prompt.textContent = `${item.taskId}: ${item.prompt}`;
      const answer = document.createElement('input');
      answer.className = 'task-answer';
      answer.value = item.answer;
      answer.dataset.taskId = item.taskId;
      answer.placeholder = 'paste answer here';
      answer.addEventListener('change', () => {
        this.events.onAnswerChanged(item.taskId, answer.value);
      });
      row.append(prompt, answer);
      this.listEl.appendChild(row);
    }
  }
}

export function withAnswer(project: Project, taskId: string, answer: string): Project {
  return {
    ...project,
    taskSheet: project.taskSheet.map((t) =>
      t.taskId === taskId ? { ...t, answer, answeredAt: Date.now() } : t,
    ),
  };
}
