// DOM rendering units for the tree pane and the prompt panel, with
// hand-built view data — no server involved.
import { describe, expect, test, vi } from 'vitest';
import { renderPrompt } from '../src/prompt';
import { renderTree } from '../src/tree';
import type { SessionView, Status, TreeDoc } from '../src/types';

const DOC: TreeDoc = {
  rootId: 'r',
  name: 'demo',
  nodes: {
    r: { id: 'r', kind: 'root', label: 'Demo', children: ['s'] },
    s: { id: 's', kind: 'sequence', label: 'Do things', children: ['d', 'p', 'rt'] },
    d: { id: 'd', kind: 'decorator', policy: { type: 'timer', periodKey: 'interval' }, children: ['a1'] },
    a1: { id: 'a1', kind: 'action', name: 'check_vitals', label: 'Check vitals', children: [] },
    p: { id: 'p', kind: 'parallel', threshold: 2, children: ['q1', 'q2'] },
    q1: { id: 'q1', kind: 'query', name: 'airway_clear', label: 'Airway clear?', children: [] },
    q2: { id: 'q2', kind: 'query', name: 'line_in', children: [] },
    rt: { id: 'rt', kind: 'decorator', policy: { type: 'retry', maxAttempts: 3 }, children: ['a2'] },
    a2: { id: 'a2', kind: 'action', name: 'reposition', children: [] },
  },
};

function drawTree(statuses: Record<string, Status | null>, pending: string | null): HTMLElement {
  const container = document.createElement('ul');
  renderTree(container, DOC, statuses, pending);
  return container;
}

function row(container: HTMLElement, id: string): HTMLElement {
  const el = container.querySelector<HTMLElement>(`li[data-node-id="${id}"] > .tree-row`);
  if (!el) throw new Error(`no row for node ${id}`);
  return el;
}

describe('renderTree', () => {
  test('renders one list item per node, nested under the root', () => {
    const container = drawTree({}, null);
    expect(container.querySelectorAll('li.tree-node').length).toBe(9);
    // children live inside their parent's subtree
    expect(container.querySelector('li[data-node-id="p"] li[data-node-id="q2"]')).not.toBeNull();
  });

  test('kind badges show the policy or shorthand for each composite', () => {
    const container = drawTree({}, null);
    const badge = (id: string) => row(container, id).querySelector('.kind-badge')?.textContent;
    expect(badge('d')).toBe('every interval');
    expect(badge('rt')).toBe('retry 3');
    expect(badge('p')).toBe('⇉ 2');
    expect(badge('s')).toBe('→');
    expect(row(container, 'r').querySelector('.kind-badge')).toBeNull();
  });

  test('labels fall back from label to leaf name', () => {
    const container = drawTree({}, null);
    expect(row(container, 'q1').querySelector('.tree-label')?.textContent).toBe('Airway clear?');
    expect(row(container, 'q2').querySelector('.tree-label')?.textContent).toBe('line_in');
  });

  test('statuses become row classes and marks; the pending node is flagged', () => {
    const container = drawTree({ s: 'running', q1: 'failure', a1: 'success' }, 'q2');
    expect(row(container, 's').classList.contains('is-running')).toBe(true);
    expect(row(container, 'q1').classList.contains('is-failure')).toBe(true);
    expect(row(container, 'q1').querySelector('.status-mark')?.textContent).toBe('✗');
    expect(row(container, 'a1').querySelector('.status-mark')?.textContent).toBe('✓');

    const pendingRow = row(container, 'q2');
    expect(pendingRow.classList.contains('is-pending')).toBe(true);
    // untouched node: no status class, no mark
    expect(pendingRow.className).not.toMatch(/is-(success|failure|running)/);
    expect(pendingRow.querySelector('.status-mark')).toBeNull();
  });

  test('leaves carry a query/action marker', () => {
    const container = drawTree({}, null);
    expect(row(container, 'q1').querySelector('.leaf-badge.leaf-query')?.textContent).toBe('?');
    expect(row(container, 'a1').querySelector('.leaf-badge.leaf-action')?.textContent).toBe('▸');
  });
});

function view(overrides: Partial<SessionView>): SessionView {
  return {
    id: 'abc123def456',
    protocol: 'demo',
    status: 'running',
    pending: null,
    time: 0,
    blackboard: {},
    nodeStatuses: {},
    traceLength: 0,
    ...overrides,
  };
}

function drawPrompt(session: SessionView, busy = false) {
  const container = document.createElement('div');
  const onOutcome = vi.fn();
  const onAdvance = vi.fn();
  renderPrompt(container, session, busy, { onOutcome, onAdvance });
  return { container, onOutcome, onAdvance };
}

describe('renderPrompt', () => {
  test('a pending question shows its prompt and wires both outcome buttons', () => {
    const session = view({
      pending: { kind: 'outcome', leafName: 'patient_ready', nodeId: 'n5', prompt: 'Patient ready?' },
    });
    const { container, onOutcome } = drawPrompt(session);

    expect(container.querySelector('.prompt-question')?.textContent).toBe('Patient ready?');
    container.querySelector<HTMLButtonElement>('.outcome-success')!.click();
    container.querySelector<HTMLButtonElement>('.outcome-failure')!.click();
    expect(onOutcome.mock.calls).toEqual([
      ['patient_ready', 'success'],
      ['patient_ready', 'failure'],
    ]);
  });

  test('a timer wait renders a single advance button with the wake time', () => {
    const session = view({
      time: 0,
      pending: {
        kind: 'advance',
        leafName: '__advance__',
        nodeId: 'timer:300',
        prompt: 'advance virtual time to the next scheduled check (t=300s)',
        due: 300,
      },
    });
    const { container, onAdvance } = drawPrompt(session);

    const button = container.querySelector<HTMLButtonElement>('.outcome-advance');
    expect(button?.textContent).toBe('Advance to t=5.0m');
    expect(container.querySelector('.outcome-success')).toBeNull();
    button!.click();
    expect(onAdvance).toHaveBeenCalledTimes(1);
  });

  test('terminal sessions show a banner instead of buttons', () => {
    const done = drawPrompt(view({ status: 'success', time: 7200 }));
    const banner = done.container.querySelector('.terminal-banner');
    expect(banner?.textContent).toBe('Protocol completed: success');
    expect(banner?.classList.contains('is-success')).toBe(true);
    expect(done.container.querySelector('.prompt-clock')?.textContent).toBe('virtual time t=2.0h');
    expect(done.container.querySelector('.outcome-button')).toBeNull();

    const failed = drawPrompt(view({ status: 'failure' }));
    expect(failed.container.querySelector('.terminal-banner')?.textContent).toBe(
      'Protocol ended: failure',
    );
  });

  test('buttons are disabled while a request is in flight', () => {
    const session = view({
      pending: { kind: 'outcome', leafName: 'patient_ready', nodeId: 'n5', prompt: 'Patient ready?' },
    });
    const { container } = drawPrompt(session, true);
    expect(container.querySelector<HTMLButtonElement>('.outcome-success')?.disabled).toBe(true);
    expect(container.querySelector<HTMLButtonElement>('.outcome-failure')?.disabled).toBe(true);
  });

  test('running with nothing pending shows a quiet note', () => {
    const { container } = drawPrompt(view({}));
    expect(container.querySelector('.prompt-note')?.textContent).toBe('Waiting on the engine…');
  });
});
