import { Api } from './api';
import { createApp } from './app';

// Served by the same origin as the API, so the base is empty. A 5s poll
// keeps the view honest if the session is advanced from another tab.
const app = createApp(document.getElementById('app') as HTMLElement, new Api(''));
setInterval(() => app.refresh(), 5000);
