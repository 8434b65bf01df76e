/** Filter panel: the two-stage filter as UI.
 *
 * Stage 1 is datum-type inclusion plus show/hide per-type columns;
 * stage 2 is value predicate rows whose operand inputs offer the
 * column's distinct values. Apply emits a FilterSpec for the grid.
 */

import type { ApiClient } from './api.js';
import type { ColumnDesc, FilterPredicate, FilterSpec } from './types.js';

export class FilterPanel {
  private schema: Record<string, ColumnDesc[]> = {};
  private includedTypes = new Set<string>();
  private hiddenColumns = new Map<string, Set<string>>();
  private predicates: FilterPredicate[] = [];
  private typeBox: HTMLElement;
  private predicateBox: HTMLElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private projectId: string,
    private onApply: (spec: FilterSpec) => void,
  ) {
    root.classList.add('filter-panel');
    const title = document.createElement('h3');
    title.textContent = 'Filter';
    this.typeBox = document.createElement('div');
    this.typeBox.className = 'filter-types';
    this.predicateBox = document.createElement('div');
    this.predicateBox.className = 'filter-predicates';
    const addButton = document.createElement('button');
    addButton.className = 'filter-add';
    addButton.textContent = '+ value filter';
    addButton.addEventListener('click', () => {
      this.predicates.push({ column: 'packageName', matchKind: 'equals', operands: [''] });
      this.renderPredicates();
    });
    const applyButton = document.createElement('button');
    applyButton.className = 'filter-apply';
    applyButton.textContent = 'Apply';
    applyButton.addEventListener('click', () => this.onApply(this.spec()));
    root.append(title, this.typeBox, this.predicateBox, addButton, applyButton);
  }

  async init(): Promise<void> {
    this.schema = await this.api.getSchema(this.projectId);
    this.includedTypes = new Set(Object.keys(this.schema));
    this.renderTypes();
    this.renderPredicates();
  }

  spec(): FilterSpec {
    const visibleColumns: Record<string, string[]> = {};
    for (const [dt, hidden] of this.hiddenColumns) {
      if (!this.includedTypes.has(dt) || hidden.size === 0) continue;
      visibleColumns[dt] = (this.schema[dt] ?? [])
        .map((c) => c.name)
        .filter((name) => !hidden.has(name));
    }
    return {
      includedDatumTypes: [...this.includedTypes].sort(),
      visibleColumns,
      valuePredicates: this.predicates.filter((p) => p.operands.some((o) => o !== '')),
    };
  }

  private renderTypes(): void {
    this.typeBox.textContent = '';
    for (const dt of Object.keys(this.schema).sort()) {
      const row = document.createElement('div');
      row.className = 'filter-type-row';
      const label = document.createElement('label');
      const check = document.createElement('input');
      check.type = 'checkbox';
      check.checked = this.includedTypes.has(dt);
      check.dataset.datumType = dt;
      check.addEventListener('change', () => {
        if (check.checked) this.includedTypes.add(dt);
        else this.includedTypes.delete(dt);
      });
      label.append(check, document.createTextNode(` ${dt}`));
      row.appendChild(label);

      const cols = document.createElement('span');
      cols.className = 'filter-columns';
      for (const col of this.schema[dt]) {
        const colLabel = document.createElement('label');
        colLabel.className = 'filter-column-toggle';
        const colCheck = document.createElement('input');
        colCheck.type = 'checkbox';
        colCheck.checked = true;
        colCheck.dataset.datumType = dt;
        colCheck.dataset.column = col.name;
        colCheck.addEventListener('change', () => {
          let hidden = this.hiddenColumns.get(dt);
          if (!hidden) this.hiddenColumns.set(dt, (hidden = new Set()));
          if (colCheck.checked) hidden.delete(col.name);
          else hidden.add(col.name);
        });
        colLabel.append(colCheck, document.createTextNode(col.name));
        cols.appendChild(colLabel);
      }
      row.appendChild(cols);
      this.typeBox.appendChild(row);
    }
  }

  private renderPredicates(): void {
    this.predicateBox.textContent = '';
    const columns = [...new Set(Object.values(this.schema).flat().map((c) => c.name))];
    this.predicates.forEach((pred, index) => {
      const row = document.createElement('div');
      row.className = 'filter-predicate-row';

      const colSelect = document.createElement('select');
      colSelect.className = 'predicate-column';
      for (const name of columns) {
        const opt = document.createElement('option');
        opt.value = name;
        opt.textContent = name;
        opt.selected = name === pred.column;
        colSelect.appendChild(opt);
      }
      colSelect.addEventListener('change', () => {
        pred.column = colSelect.value;
        void this.fillDatalist(pred, list);
      });

      const kindSelect = document.createElement('select');
      kindSelect.className = 'predicate-kind';
      for (const kind of ['equals', 'oneOf', 'contains'] as const) {
        const opt = document.createElement('option');
        opt.value = kind;
        opt.textContent = kind;
        opt.selected = kind === pred.matchKind;
        kindSelect.appendChild(opt);
      }
      kindSelect.addEventListener('change', () => {
        pred.matchKind = kindSelect.value as FilterPredicate['matchKind'];
      });

      const operand = document.createElement('input');
      operand.className = 'predicate-operand';
      operand.placeholder = 'value (comma-separate for oneOf)';
      operand.value = pred.operands.join(',');
      const list = document.createElement('datalist');
      list.id = `distinct-${this.projectId}-${index}`;
      operand.setAttribute('list', list.id);
      operand.addEventListener('input', () => {
        pred.operands =
          pred.matchKind === 'oneOf' ? operand.value.split(',') : [operand.value];
      });

      const remove = document.createElement('button');
      remove.textContent = 'x';
      remove.className = 'predicate-remove';
      remove.addEventListener('click', () => {
        this.predicates.splice(index, 1);
        this.renderPredicates();
      });

      row.append(colSelect, kindSelect, operand, list, remove);
      this.predicateBox.appendChild(row);
      void this.fillDatalist(pred, list);
    });
  }

  private async fillDatalist(pred: FilterPredicate, list: HTMLElement): Promise<void> {
    const within = [...this.includedTypes].filter((dt) =>
      (this.schema[dt] ?? []).some((c) => c.name === pred.column),
    );
    if (within.length === 0) return;
    let values: string[];
    try {
      values = await this.api.getDistinct(this.projectId, pred.column, within);
    } catch {
      return; // dropdown stays empty; typing still works
    }
    list.textContent = '';
    for (const v of values.slice(0, 200)) {
      const opt = document.createElement('option');
      opt.value = v;
      list.appendChild(opt);
    }
  }
}
