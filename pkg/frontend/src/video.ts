// Comment page: video playback, the simulated comment forest, reply boxes,
// and the persona-crafting form.  While a generation job holds the video the
// page sits in a waiting state and polls the job instead.

import {
  ApiError,
  getComments,
  getVideo,
  postPersonaComment,
  requestMoreComments,
  thumbnailUrl,
  videoFileUrl,
} from "./api";
import { CommentView } from "./comments";
import { formatDuration, formatPercent } from "./format";
import { pollJob, type PollHandle } from "./poll";
import { ProgressTracker, failedStage, stageLabel } from "./progress";
import type { CommentNode } from "./types";

export function renderVideoPage(container: HTMLElement, videoId: string): () => void {
  container.innerHTML = `
    <section class="video-page">
      <a class="back-link" href="#/">Back to videos</a>
      <div class="player-wrap"></div>
      <h2 class="video-title"></h2>
      <div class="video-meta"></div>
      <p class="video-desc"></p>
      <section class="persona-section">
        <h3>Watch as someone else</h3>
        <p class="hint">Describe a viewer and a comment is written from their point of view.</p>
        <form id="persona-form">
          <textarea class="persona-input" rows="2"
            placeholder="e.g. A retired math teacher who loves dry humor"></textarea>
          <button type="submit" disabled>Generate comment</button>
        </form>
      </section>
      <section class="comments-section">
        <div class="error-banner page-error" hidden></div>
        <div class="generation-status" hidden></div>
        <div class="comments-head">
          <h3>Comments</h3>
          <form id="more-form">
            <input type="number" class="more-count" min="1" value="10" />
            <button type="submit">Generate more</button>
          </form>
        </div>
        <div id="comments"></div>
      </section>
    </section>
  `;

  const statusBox = container.querySelector<HTMLElement>(".generation-status")!;
  const errorBox = container.querySelector<HTMLElement>(".page-error")!;
  const forestBox = container.querySelector<HTMLElement>("#comments")!;
  let currentPoll: PollHandle | null = null;

  const showError = (message: string) => {
    errorBox.textContent = message;
    errorBox.hidden = false;
  };

  const view = new CommentView(forestBox, {
    onConflict: () => void refreshForest(),
    onError: showError,
  });

  async function refreshForest(): Promise<void> {
    let forest;
    try {
      forest = await getComments(videoId);
    } catch {
      showError("Could not load comments.");
      return;
    }
    view.render(forest.comments);
    if (forest.active_job !== null) {
      waitForJob(forest.active_job);
    } else {
      statusBox.hidden = true;
    }
  }

  /** Waiting state: a job holds this video, show its progress until done. */
  function waitForJob(jobId: string): void {
    currentPoll?.stop();
    const tracker = new ProgressTracker();
    statusBox.hidden = false;
    statusBox.innerHTML = `
      <span class="status-label">Working</span>
      <div class="progress-track"><div class="progress-fill"></div></div>
    `;
    const label = statusBox.querySelector<HTMLElement>(".status-label")!;
    const fill = statusBox.querySelector<HTMLElement>(".progress-fill")!;

    currentPoll = pollJob(jobId, (job) => {
      if (job.stage === "failed") {
        statusBox.hidden = true;
        showError(
          `Comment generation failed during ${stageLabel(failedStage(job))}: ` +
            (job.error ?? "unknown error"),
        );
        return;
      }
      const shown = tracker.update(job.progress);
      fill.style.width = formatPercent(shown);
      label.textContent = `${stageLabel(job.stage)} ${formatPercent(shown)}`;
      if (job.stage === "done") {
        void refreshForest();
      }
    });
    currentPoll.done.catch(() => showError("Lost contact with the generation job."));
  }

  void loadVideo(container, videoId);
  void refreshForest();
  wirePersonaForm(container, videoId, view, showError, refreshForest);
  wireMoreForm(container, videoId, waitForJob, showError, refreshForest);

  return () => {
    currentPoll?.stop();
  };
}

async function loadVideo(container: HTMLElement, videoId: string): Promise<void> {
  try {
    const video = await getVideo(videoId);
    const player = document.createElement("video");
    player.controls = true;
    player.src = videoFileUrl(videoId);
    if (video.has_thumbnail) {
      player.poster = thumbnailUrl(videoId);
    }
    container.querySelector(".player-wrap")?.append(player);
    container.querySelector(".video-title")!.textContent = video.title;
    const metaParts = [video.author, formatDuration(video.duration)].filter(Boolean);
    container.querySelector(".video-meta")!.textContent = metaParts.join(" · ");
    container.querySelector(".video-desc")!.textContent = video.description;
  } catch {
    container.querySelector(".video-title")!.textContent = "Video not found";
  }
}

function wirePersonaForm(
  container: HTMLElement,
  videoId: string,
  view: CommentView,
  showError: (message: string) => void,
  refreshForest: () => Promise<void>,
): void {
  const form = container.querySelector<HTMLFormElement>("#persona-form")!;
  const input = form.querySelector<HTMLTextAreaElement>("textarea")!;
  const submit = form.querySelector<HTMLButtonElement>("button")!;

  input.addEventListener("input", () => {
    submit.disabled = input.value.trim() === "";
  });
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (text === "" || submit.disabled) return;
    submit.disabled = true;
    postPersonaComment(videoId, text)
      .then((record) => {
        const node: CommentNode = { ...record, children: [] };
        view.prependRoot(node);
        input.value = "";
      })
      .catch((error: unknown) => {
        if (error instanceof ApiError && error.status === 409) {
          void refreshForest();
        } else {
          showError(error instanceof Error ? error.message : String(error));
        }
      })
      .finally(() => {
        submit.disabled = input.value.trim() === "";
      });
  });
}

function wireMoreForm(
  container: HTMLElement,
  videoId: string,
  waitForJob: (jobId: string) => void,
  showError: (message: string) => void,
  refreshForest: () => Promise<void>,
): void {
  const form = container.querySelector<HTMLFormElement>("#more-form")!;
  const count = form.querySelector<HTMLInputElement>("input")!;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const n = Math.max(1, Number(count.value) || 1);
    requestMoreComments(videoId, n)
      .then(({ job_id }) => waitForJob(job_id))
      .catch((error: unknown) => {
        if (error instanceof ApiError && error.status === 409) {
          void refreshForest();
        } else {
          showError(error instanceof Error ? error.message : String(error));
        }
      });
  });
}
