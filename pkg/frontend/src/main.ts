import { ApiClient } from "./api.js";
import { App, type AppElements } from "./app.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

const els: AppElements = {
  tablePicker: byId<HTMLSelectElement>("table-picker"),
  startButton: byId<HTMLButtonElement>("start-session"),
  tableHost: byId<HTMLElement>("table-host"),
  transcriptHost: byId<HTMLElement>("transcript-host"),
  questionInput: byId<HTMLInputElement>("question-input"),
  askButton: byId<HTMLButtonElement>("ask-button"),
  bannerHost: byId<HTMLElement>("banner-host"),
};

const app = new App(document, els, new ApiClient(), window.localStorage);
void app.init();
