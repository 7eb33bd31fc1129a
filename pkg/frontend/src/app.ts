import { Api, ApiError } from './api';
import { createStore } from './store';
import { renderPrompt } from './prompt';
import { renderTimeline } from './timeline';
import { renderTree } from './tree';
import type { ProtocolSummary, SessionView, TraceEvent } from './types';

interface AppState {
  protocols: ProtocolSummary[];
  session: SessionView | null;
  trace: TraceEvent[];
  busy: boolean;
  error: string | null;
}

export interface App {
  /** Resolves when every queued request/render has settled. */
  whenIdle(): Promise<void>;
  /** Re-fetch the current session (no-op on the picker screen). */
  refresh(): void;
}

/**
 * Wire the stepper into `root`. All state changes flow one way: a button
 * press queues one HTTP call, and the DOM is rebuilt from the server's
 * response — the client never guesses ahead of the server.
 */
export function createApp(root: HTMLElement, api: Api): App {
  const store = createStore<AppState>({
    protocols: [],
    session: null,
    trace: [],
    busy: false,
    error: null,
  });

  let queue: Promise<void> = Promise.resolve();
  const enqueue = (work: () => Promise<void>): void => {
    store.set({ busy: true, error: null });
    queue = queue
      .then(work)
      .catch((err: unknown) => {
        const message = err instanceof ApiError ? err.message : `request failed: ${String(err)}`;
        store.set({ error: message });
      })
      .finally(() => store.set({ busy: false }));
  };

  const loadSession = async (view: SessionView): Promise<void> => {
    const trace = await api.getTrace(view.id, 0, 1000);
    store.set({ session: view, trace: trace.events });
  };

  enqueue(async () => {
    store.set({ protocols: await api.listProtocols() });
  });

  const handlers = {
    onStart(name: string) {
      enqueue(async () => loadSession(await api.createSession(name)));
    },
    onOutcome(leaf: string, outcome: 'success' | 'failure') {
      const session = store.get().session;
      if (!session) return;
      enqueue(async () => loadSession(await api.submitOutcome(session.id, leaf, outcome)));
    },
    onAdvance() {
      const session = store.get().session;
      if (!session) return;
      enqueue(async () => loadSession(await api.advance(session.id)));
    },
    onFork() {
      const session = store.get().session;
      if (!session) return;
      enqueue(async () => loadSession(await api.forkSession(session.id)));
    },
    onBack() {
      store.set({ session: null, trace: [], error: null });
    },
  };

  function sync(): void {
    const state = store.get();
    root.innerHTML = '';

    const app = document.createElement('div');
    app.className = 'app';
    root.appendChild(app);

    const header = document.createElement('header');
    header.className = 'app-header';
    const title = document.createElement('h1');
    title.textContent = 'Protocol stepper';
    header.appendChild(title);
    if (state.session) {
      const meta = document.createElement('div');
      meta.className = 'session-meta';
      meta.textContent = `${state.session.protocol} · session ${state.session.id} · ${state.session.status}`;
      header.appendChild(meta);

      const fork = document.createElement('button');
      fork.type = 'button';
      fork.className = 'header-button fork-button';
      fork.textContent = 'Fork';
      fork.disabled = state.busy;
      fork.addEventListener('click', handlers.onFork);
      header.appendChild(fork);

      const back = document.createElement('button');
      back.type = 'button';
      back.className = 'header-button back-button';
      back.textContent = 'All protocols';
      back.addEventListener('click', handlers.onBack);
      header.appendChild(back);
    }
    app.appendChild(header);

    if (state.error) {
      const error = document.createElement('div');
      error.className = 'error-banner';
      error.setAttribute('role', 'alert');
      error.textContent = state.error;
      app.appendChild(error);
    }

    app.appendChild(state.session ? sessionScreen(state) : pickerScreen(state));
  }

  function pickerScreen(state: AppState): HTMLElement {
    const section = document.createElement('section');
    section.className = 'picker';
    for (const protocol of state.protocols) {
      const card = document.createElement('article');
      card.className = 'protocol-card';

      const name = document.createElement('h2');
      name.textContent = protocol.title || protocol.name;
      card.appendChild(name);

      const detail = document.createElement('p');
      detail.className = 'protocol-detail';
      detail.textContent = `${protocol.name} · ${protocol.leafCount} steps · ${protocol.source}`;
      card.appendChild(detail);

      const start = document.createElement('button');
      start.type = 'button';
      start.className = 'start-button';
      start.dataset.protocol = protocol.name;
      start.textContent = 'Start session';
      start.disabled = state.busy;
      start.addEventListener('click', () => handlers.onStart(protocol.name));
      card.appendChild(start);

      section.appendChild(card);
    }
    return section;
  }

  function sessionScreen(state: AppState): HTMLElement {
    const session = state.session!;
    const section = document.createElement('section');
    section.className = 'session';

    const treePane = document.createElement('div');
    treePane.className = 'pane pane-tree';
    const treeList = document.createElement('ul');
    treeList.className = 'tree-root';
    treePane.appendChild(treeList);
    if (session.tree) {
      renderTree(treeList, session.tree, session.nodeStatuses, session.pending?.nodeId ?? null);
    }
    section.appendChild(treePane);

    const sidePane = document.createElement('div');
    sidePane.className = 'pane pane-side';

    const promptPanel = document.createElement('div');
    promptPanel.className = 'prompt-panel';
    renderPrompt(promptPanel, session, state.busy, handlers);
    sidePane.appendChild(promptPanel);

    const timelinePanel = document.createElement('div');
    timelinePanel.className = 'timeline-panel';
    renderTimeline(timelinePanel, state.trace, session.tree);
    sidePane.appendChild(timelinePanel);

    section.appendChild(sidePane);
    return section;
  }

  store.subscribe(sync);
  sync();

  return {
    whenIdle: () => queue,
    refresh() {
      const session = store.get().session;
      if (!session) return;
      enqueue(async () => loadSession(await api.getSession(session.id)));
    },
  };
}
