import type { Pending, SessionView } from './types';

export interface PromptHandlers {
  onOutcome(leaf: string, outcome: 'success' | 'failure'): void;
  onAdvance(): void;
}

function formatClock(seconds: number): string {
  if (seconds >= 3600) return `${(seconds / 3600).toFixed(1)}h`;
  if (seconds >= 60) return `${(seconds / 60).toFixed(1)}m`;
  return `${seconds.toFixed(0)}s`;
}

/**
 * The action panel: one question at a time. Either the pending leaf's
 * prompt with Success/Failure buttons, the advance-time button for a timer
 * wait, or the terminal banner when the session has ended.
 */
export function renderPrompt(
  container: HTMLElement,
  session: SessionView,
  busy: boolean,
  handlers: PromptHandlers,
): void {
  container.innerHTML = '';

  const clock = document.createElement('div');
  clock.className = 'prompt-clock';
  clock.textContent = `virtual time t=${formatClock(session.time)}`;
  container.appendChild(clock);

  if (session.status !== 'running') {
    const banner = document.createElement('div');
    banner.className = `terminal-banner is-${session.status}`;
    banner.setAttribute('role', 'status');
    banner.textContent =
      session.status === 'success' ? 'Protocol completed: success' : 'Protocol ended: failure';
    container.appendChild(banner);
    return;
  }

  const pending = session.pending;
  if (!pending) {
    const note = document.createElement('div');
    note.className = 'prompt-note';
    note.textContent = 'Waiting on the engine…';
    container.appendChild(note);
    return;
  }

  const question = document.createElement('div');
  question.className = 'prompt-question';
  question.textContent = pending.prompt;
  container.appendChild(question);

  const buttons = document.createElement('div');
  buttons.className = 'prompt-buttons';
  container.appendChild(buttons);

  if (pending.kind === 'advance') {
    const advance = button('Advance to next check', 'advance', busy);
    if (pending.due !== undefined) {
      advance.textContent = `Advance to t=${formatClock(pending.due)}`;
    }
    advance.addEventListener('click', () => handlers.onAdvance());
    buttons.appendChild(advance);
    return;
  }

  const yes = button('Success', 'success', busy);
  yes.addEventListener('click', () => handlers.onOutcome(pending.leafName, 'success'));
  const no = button('Failure', 'failure', busy);
  no.addEventListener('click', () => handlers.onOutcome(pending.leafName, 'failure'));
  buttons.appendChild(yes);
  buttons.appendChild(no);
}

function button(text: string, flavor: string, disabled: boolean): HTMLButtonElement {
  const el = document.createElement('button');
  el.type = 'button';
  el.className = `outcome-button outcome-${flavor}`;
  el.textContent = text;
  el.disabled = disabled;
  return el;
}
