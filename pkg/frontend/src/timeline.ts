import type { TraceEvent, TreeDoc } from './types';

function describe(event: TraceEvent, tree: TreeDoc | undefined): string {
  const nodeName = (id: string | null | undefined): string => {
    if (!id) return '?';
    const node = tree?.nodes[id];
    return node ? node.label || node.name || node.kind : id;
  };
  switch (event.kind) {
    case 'node_entered':
      return `entered ${nodeName(event.node)}`;
    case 'node_returned':
      return `${nodeName(event.node)} → ${event.status}`;
    case 'halted':
      return `halted ${nodeName(event.node)}`;
    case 'blackboard_write':
      return `${event.key} := ${JSON.stringify(event.value)}`;
    case 'event_applied':
      return `external event: ${event.key} := ${JSON.stringify(event.value)}`;
    default:
      return event.kind;
  }
}

/** Most-recent-last list of execution events, capped for readability. */
export function renderTimeline(
  container: HTMLElement,
  events: TraceEvent[],
  tree: TreeDoc | undefined,
  limit = 40,
): void {
  container.innerHTML = '';
  const shown = events.slice(-limit);
  const list = document.createElement('ol');
  list.className = 'timeline';
  for (const event of shown) {
    const item = document.createElement('li');
    item.className = `timeline-event kind-${event.kind}`;
    const time = document.createElement('span');
    time.className = 'timeline-time';
    time.textContent = `t=${event.t}`;
    const text = document.createElement('span');
    text.textContent = describe(event, tree);
    item.appendChild(time);
    item.appendChild(text);
    list.appendChild(item);
  }
  container.appendChild(list);
  container.scrollTop = container.scrollHeight;
}
