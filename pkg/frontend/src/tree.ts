import type { Status, TreeDoc, TreeNode } from './types';

const KIND_GLYPHS: Record<string, string> = {
  sequence: '→', // →
  selector: '?',
  parallel: '⇉', // ⇉
  recovery: '↩', // ↩
  decorator: '⟳', // ⟳
};

function kindBadge(node: TreeNode): string {
  if (node.kind === 'parallel') return `${KIND_GLYPHS.parallel} ${node.threshold ?? '?'}`;
  if (node.kind === 'decorator') {
    const p = node.policy;
    if (p?.type === 'retry') return `retry ${p.maxAttempts}`;
    if (p?.type === 'timer') return `every ${p.periodKey}`;
    if (p?.type === 'repeat_until') return 'repeat';
    return KIND_GLYPHS.decorator;
  }
  return KIND_GLYPHS[node.kind] ?? node.kind;
}

function nodeText(node: TreeNode): string {
  return node.label || node.name || node.kind;
}

/**
 * Render the tree as nested lists. Each node carries `data-node-id`, a
 * status class (`is-success` / `is-failure` / `is-running`), and the node
 * the session is waiting on gets `is-pending`.
 */
export function renderTree(
  container: HTMLElement,
  tree: TreeDoc,
  statuses: Record<string, Status | null>,
  pendingNodeId: string | null,
): void {
  container.innerHTML = '';
  container.appendChild(renderNode(tree, tree.rootId, statuses, pendingNodeId));
}

function renderNode(
  tree: TreeDoc,
  nodeId: string,
  statuses: Record<string, Status | null>,
  pendingNodeId: string | null,
): HTMLElement {
  const node = tree.nodes[nodeId];
  const li = document.createElement('li');
  li.className = `tree-node kind-${node.kind}`;
  li.dataset.nodeId = node.id;

  const row = document.createElement('div');
  row.className = 'tree-row';
  const status = statuses[node.id] ?? null;
  if (status) row.classList.add(`is-${status}`);
  if (node.id === pendingNodeId) row.classList.add('is-pending');

  if (node.kind !== 'root' && (node.children.length > 0 || node.kind === 'decorator')) {
    const badge = document.createElement('span');
    badge.className = 'kind-badge';
    badge.textContent = kindBadge(node);
    row.appendChild(badge);
  }
  if (node.kind === 'action' || node.kind === 'query') {
    const leaf = document.createElement('span');
    leaf.className = `leaf-badge leaf-${node.kind}`;
    leaf.textContent = node.kind === 'query' ? '?' : '▸';
    row.appendChild(leaf);
  }

  const label = document.createElement('span');
  label.className = 'tree-label';
  label.textContent = nodeText(node);
  row.appendChild(label);

  if (status) {
    const mark = document.createElement('span');
    mark.className = 'status-mark';
    mark.textContent = status === 'success' ? '✓' : status === 'failure' ? '✗' : '…';
    row.appendChild(mark);
  }

  li.appendChild(row);

  if (node.children.length > 0) {
    const ul = document.createElement('ul');
    ul.className = 'tree-children';
    for (const child of node.children) {
      ul.appendChild(renderNode(tree, child, statuses, pendingNodeId));
    }
    li.appendChild(ul);
  }
  return li;
}
