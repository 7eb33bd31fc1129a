// End-to-end tests: every test here talks to a real `caretree serve` process
// (started once in tests/global-setup.ts) and drives the page the way a user
// would — clicks in, server responses out.
import { expect, inject, test } from 'vitest';
import { Api } from '../src/api';
import { createApp, type App } from '../src/app';

const base = inject('apiBase');

function mount(): App {
  document.body.innerHTML = '<main id="app"></main>';
  return createApp(document.querySelector<HTMLElement>('#app')!, new Api(base));
}

function q<T extends HTMLElement = HTMLElement>(selector: string): T {
  const el = document.querySelector<T>(selector);
  if (!el) throw new Error(`expected an element matching ${selector}`);
  return el;
}

function text(selector: string): string {
  return q(selector).textContent?.trim() ?? '';
}

function click(selector: string): void {
  q<HTMLButtonElement>(selector).click();
}

function rowFor(nodeId: string): HTMLElement {
  return q(`li[data-node-id="${nodeId}"] > .tree-row`);
}

/** The node the session is waiting on, read straight off the rendered tree. */
function pendingNodeId(): string {
  const li = q('.tree-row.is-pending').closest<HTMLElement>('li[data-node-id]');
  if (!li?.dataset.nodeId) throw new Error('pending row is not inside a node item');
  return li.dataset.nodeId;
}

/** Find a node id by its rendered label (a row's own label, not a child's). */
function nodeIdByLabel(label: string): string {
  for (const li of document.querySelectorAll<HTMLElement>('li.tree-node')) {
    if (li.querySelector('.tree-row .tree-label')?.textContent === label) {
      return li.dataset.nodeId ?? '';
    }
  }
  throw new Error(`no tree node labelled ${JSON.stringify(label)}`);
}

function sessionIdFromHeader(): string {
  const match = text('.session-meta').match(/session ([0-9a-f]+)/);
  if (!match) throw new Error(`no session id in ${JSON.stringify(text('.session-meta'))}`);
  return match[1];
}

async function startBloodDraw(app: App): Promise<void> {
  await app.whenIdle();
  click('.start-button[data-protocol="blood-draw"]');
  await app.whenIdle();
}

test('picker lists the bundled protocols with their step counts', async () => {
  const app = mount();
  await app.whenIdle();

  expect(document.querySelectorAll('.protocol-card').length).toBeGreaterThanOrEqual(5);
  const card = q('.start-button[data-protocol="blood-draw"]').closest('.protocol-card')!;
  expect(card.querySelector('h2')?.textContent).toBe('Blood draw (phlebotomy)');
  expect(card.querySelector('.protocol-detail')?.textContent).toBe('blood-draw · 9 steps · bundled');
});

test('blood draw walkthrough: prompts follow tree order, selector ends green', async () => {
  const app = mount();
  await startBloodDraw(app);

  // structural anchors, read from the rendered tree itself
  const readyId = nodeIdByLabel('Patient ready?');
  const selectorId = nodeIdByLabel('Find a suitable vein');
  const arms = [
    ...document.querySelectorAll<HTMLElement>(
      `li[data-node-id="${selectorId}"] > .tree-children > li`,
    ),
  ].map((li) => li.dataset.nodeId ?? '');
  expect(arms).toHaveLength(2);
  const [leftId, rightId] = arms;

  const visited: string[] = [];
  const prompts: string[] = [];
  const answer = async (outcome: 'success' | 'failure'): Promise<void> => {
    visited.push(pendingNodeId());
    prompts.push(text('.prompt-question'));
    click(`.outcome-${outcome}`);
    await app.whenIdle();
  };

  await answer('success'); // patient is ready
  await answer('failure'); // left arm: nothing usable
  await answer('success'); // right arm works

  expect(prompts).toEqual([
    'Patient ready?',
    'Suitable vein in left arm?',
    'Suitable vein in right arm?',
  ]);
  expect(visited).toEqual([readyId, leftId, rightId]);

  // Sequence memory never steps backwards: each highlighted node sits strictly
  // after the previous one in depth-first order, and the selector tried its
  // children in declaration order (left before right).
  const docOrder = [...document.querySelectorAll<HTMLElement>('li.tree-node')].map(
    (li) => li.dataset.nodeId ?? '',
  );
  const positions = visited.map((id) => docOrder.indexOf(id));
  expect(positions[0]).toBeGreaterThanOrEqual(0);
  expect(positions[1]).toBeGreaterThan(positions[0]);
  expect(positions[2]).toBeGreaterThan(positions[1]);

  // terminal view: the session succeeded, and the selector reports success
  // even though its first branch failed
  expect(text('.terminal-banner')).toBe('Protocol completed: success');
  expect(q('.terminal-banner').classList.contains('is-success')).toBe(true);
  expect(text('.session-meta')).toMatch(/· success$/);
  expect(rowFor(selectorId).classList.contains('is-success')).toBe(true);
  expect(rowFor(leftId).classList.contains('is-failure')).toBe(true);
  expect(rowFor(rightId).classList.contains('is-success')).toBe(true);
  expect(document.querySelector('.tree-row.is-pending')).toBeNull();
  expect(document.querySelector('.outcome-button')).toBeNull();

  // the timeline recorded the selector's verdict
  const entries = [...document.querySelectorAll('.timeline-event')].map(
    (item) => item.textContent ?? '',
  );
  expect(entries.some((entry) => entry.includes('Find a suitable vein → success'))).toBe(true);
});

test('when neither arm has a vein the whole procedure fails', async () => {
  const app = mount();
  await startBloodDraw(app);

  click('.outcome-success'); // patient ready
  await app.whenIdle();
  click('.outcome-failure'); // left arm
  await app.whenIdle();
  click('.outcome-failure'); // right arm
  await app.whenIdle();

  expect(text('.terminal-banner')).toBe('Protocol ended: failure');
  expect(q('.terminal-banner').classList.contains('is-failure')).toBe(true);
  expect(rowFor(nodeIdByLabel('Find a suitable vein')).classList.contains('is-failure')).toBe(true);
  // the sequence aborted: the steps after the selector were never reached
  expect(rowFor(nodeIdByLabel('Apply tourniquet')).className).not.toMatch(
    /is-(success|failure|running)/,
  );
});

test('refresh picks up progress made outside the page', async () => {
  const app = mount();
  await startBloodDraw(app);
  expect(text('.prompt-question')).toBe('Patient ready?');

  // someone else answers over the API while this page sits idle
  await new Api(base).submitOutcome(sessionIdFromHeader(), 'patient_ready', 'success');

  app.refresh();
  await app.whenIdle();
  expect(text('.prompt-question')).toBe('Suitable vein in left arm?');
  expect(pendingNodeId()).toBe(nodeIdByLabel('Suitable vein in left arm?'));
});

test('a stale submission surfaces the conflict and a refresh recovers', async () => {
  const app = mount();
  await startBloodDraw(app);
  const sessionId = sessionIdFromHeader();

  // the server moves on without the page noticing
  await new Api(base).submitOutcome(sessionId, 'patient_ready', 'success');

  click('.outcome-success'); // answers the question the page still shows
  await app.whenIdle();

  const banner = q('.error-banner');
  expect(banner.getAttribute('role')).toBe('alert');
  expect(banner.textContent).toContain("waiting on 'vein_left_arm'");

  app.refresh();
  await app.whenIdle();
  expect(document.querySelector('.error-banner')).toBeNull();
  expect(text('.prompt-question')).toBe('Suitable vein in left arm?');
});

test('forking mid-run leaves the original session untouched', async () => {
  const app = mount();
  await startBloodDraw(app);
  click('.outcome-success'); // patient ready
  await app.whenIdle();
  const originalId = sessionIdFromHeader();

  click('.fork-button');
  await app.whenIdle();
  const forkId = sessionIdFromHeader();
  expect(forkId).not.toBe(originalId);
  // the fork resumes at the same question
  expect(text('.prompt-question')).toBe('Suitable vein in left arm?');

  // drive the fork to the end; the original is still waiting
  click('.outcome-success');
  await app.whenIdle();
  expect(text('.terminal-banner')).toBe('Protocol completed: success');

  const original = await new Api(base).getSession(originalId);
  expect(original.status).toBe('running');
  expect(original.pending?.leafName).toBe('vein_left_arm');

  // back to the picker without losing the server-side sessions
  click('.back-button');
  expect(document.querySelector('.picker')).not.toBeNull();
  expect(document.querySelector('.session-meta')).toBeNull();
});

test('api client: uploaded timer protocol waits, advances, and pages its trace', async () => {
  const api = new Api(base);
  const dsl = [
    'root "Timer demo"',
    '  parallel 1',
    '    timer interval',
    '      sequence',
    '        query vitals_ok "Vitals acceptable?"',
    '        action escalate "Escalate to the care team"',
    '    sequence "Main task"',
    '      query main_done "Main task finished?"',
    '',
  ].join('\n');
  const uploaded = await fetch(`${base}/api/v1/protocols`, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify({ name: 'timer-demo-ui', dsl, title: 'Timer demo' }),
  });
  expect(uploaded.status).toBe(201);

  const created = await api.createSession('timer-demo-ui', { interval: { duration: '5m' } });
  expect(created.pending?.leafName).toBe('main_done');

  const waiting = await api.submitOutcome(created.id, 'main_done', 'failure');
  expect(waiting.status).toBe('running');
  expect(waiting.pending?.kind).toBe('advance');
  expect(waiting.pending?.due).toBe(300);

  const fired = await api.advance(created.id);
  expect(fired.time).toBe(300);
  expect(fired.pending?.leafName).toBe('vitals_ok');

  const done = await api.submitOutcome(created.id, 'vitals_ok', 'success');
  expect(done.status).toBe('success');

  // trace pages tile the log in time order without gaps or overlap
  const first = await api.getTrace(created.id, 0, 5);
  const second = await api.getTrace(created.id, 1, 5);
  expect(first.total).toBe(done.traceLength);
  expect(first.events).toHaveLength(5);
  expect(second.events.length).toBeGreaterThan(0);
  expect(first.events.at(-1)!.t).toBeLessThanOrEqual(second.events[0].t);

  await expect(api.createSession('no-such-protocol')).rejects.toMatchObject({
    name: 'ApiError',
    status: 404,
  });
});
