import type { ApiClient } from './services/api';
import { ApiError } from './services/api';
import { clear, el, on } from './utils/dom';
import { renderOverview } from './views/overview';
import { RiskView } from './views/risk';
import { ScreeningView } from './views/screening';

type TabName = 'overview' | 'risk' | 'screening';

/**
 * Top-level shell: three tabs, one content region.
 *
 * Every view render goes through guard(), which replaces the content with
 * an inline error banner plus a retry button on failure. The screen is
 * never left blank.
 */
export class App {
  private readonly content: HTMLElement;
  private readonly tabs = new Map<TabName, HTMLButtonElement>();
  private active: TabName = 'overview';

  constructor(root: HTMLElement, private readonly api: ApiClient) {
    const nav = el('nav', 'tabs');
    const add = (name: TabName, label: string) => {
      const button = el('button', 'tab', label);
      button.dataset.tab = name;
      on(button, 'click', () => void this.show(name));
      nav.appendChild(button);
      this.tabs.set(name, button);
    };
    add('overview', 'Overview');
    add('risk', 'Attrition risk');
    add('screening', 'Screening');

    this.content = el('main', 'content');
    this.content.id = 'content';

    const header = el('header', 'masthead');
    header.appendChild(el('h1', '', 'Retention Dashboard'));
    header.appendChild(nav);

    root.replaceChildren(header, this.content);
  }

  async start(): Promise<void> {
    await this.show('overview');
  }

  async show(name: TabName): Promise<void> {
    this.active = name;
    for (const [tab, button] of this.tabs) {
      button.classList.toggle('active', tab === name);
    }
    await this.guard(() => this.renderActive());
  }

  private renderActive(): Promise<void> {
    switch (this.active) {
      case 'overview':
        return renderOverview(this.content, this.api);
      case 'risk':
        return new RiskView(this.content, this.api).render();
      case 'screening':
        return new ScreeningView(this.content, this.api).render();
    }
  }

  /** Run a render; on failure show a banner with a retry button instead. */
  private async guard(render: () => Promise<void>): Promise<void> {
    try {
      await render();
    } catch (err) {
      clear(this.content);
      const banner = el('div', 'banner error');
      banner.appendChild(el('span', '', describe(err)));
      const retry = el('button', 'retry', 'Retry');
      on(retry, 'click', () => void this.guard(render));
      banner.appendChild(retry);
      this.content.appendChild(banner);
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0
      ? `Cannot reach the model server: ${err.message}`
      : `Server error (${err.code}): ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
