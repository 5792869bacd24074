// Video list: one row per upload, newest activity from the service included
// as latest_job.  Rows with a live job poll it and draw a progress bar; the
// "Show Result" button appears once the job lands on "done".

import { getJob, listVideos, thumbnailUrl } from "./api";
import { formatDuration, formatPercent } from "./format";
import { pollJob, type PollHandle } from "./poll";
import { ProgressTracker, failedStage, stageLabel } from "./progress";
import type { JobRecord, VideoListEntry } from "./types";

export function renderVideoList(container: HTMLElement): () => void {
  const handles: PollHandle[] = [];
  container.innerHTML = `
    <section class="video-list">
      <div class="list-head">
        <h2>Videos</h2>
        <a class="upload-link button" href="#/upload">Upload video</a>
      </div>
      <ul id="videos" class="videos"></ul>
    </section>
  `;
  const list = container.querySelector<HTMLElement>("#videos")!;
  void loadRows(list, handles);
  return () => {
    for (const handle of handles) handle.stop();
  };
}

async function loadRows(list: HTMLElement, handles: PollHandle[]): Promise<void> {
  let videos: VideoListEntry[];
  try {
    videos = (await listVideos()).videos;
  } catch {
    list.innerHTML = '<li class="error-banner">Could not load the video list.</li>';
    return;
  }
  if (videos.length === 0) {
    list.innerHTML = '<li class="empty">No videos yet. Upload one to get started.</li>';
    return;
  }
  list.textContent = "";
  for (const video of videos) {
    list.append(renderRow(video, handles));
  }
}

function renderRow(video: VideoListEntry, handles: PollHandle[]): HTMLElement {
  const row = document.createElement("li");
  row.className = "video-row";
  row.dataset.id = video.video_id;

  const thumb = document.createElement("div");
  thumb.className = "thumb";
  if (video.has_thumbnail) {
    const img = document.createElement("img");
    img.src = thumbnailUrl(video.video_id);
    img.alt = "";
    thumb.append(img);
  }

  const info = document.createElement("div");
  info.className = "video-info";
  const title = document.createElement("a");
  title.className = "video-title";
  title.href = `#/video/${encodeURIComponent(video.video_id)}`;
  title.textContent = video.title;
  const meta = document.createElement("div");
  meta.className = "video-meta";
  const metaParts = [video.author, formatDuration(video.duration)].filter(Boolean);
  meta.textContent = metaParts.join(" · ");
  info.append(title, meta);

  const status = document.createElement("div");
  status.className = "video-status";
  row.append(thumb, info, status);

  const job = video.latest_job;
  if (job === null || job.stage === "done") {
    renderShowResult(status, video.video_id, job !== null);
  } else if (job.stage === "failed") {
    // the list snapshot has no history; fetch the record for the stage name
    getJob(job.job_id).then(
      (record) => renderFailure(status, record),
      () => renderFailure(status, null),
    );
  } else {
    watchJob(status, video.video_id, job, handles);
  }
  return row;
}

function renderShowResult(status: HTMLElement, videoId: string, fromJob: boolean): void {
  status.textContent = "";
  const button = document.createElement("button");
  button.type = "button";
  button.className = "show-result";
  button.textContent = fromJob ? "Show Result" : "View comments";
  button.addEventListener("click", () => {
    window.location.hash = `#/video/${encodeURIComponent(videoId)}`;
  });
  status.append(button);
}

function renderFailure(status: HTMLElement, job: JobRecord | null): void {
  status.textContent = "";
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = job
    ? `Processing failed during ${stageLabel(failedStage(job))}: ${job.error ?? "unknown error"}`
    : "Processing failed.";
  status.append(banner);
}

function watchJob(
  status: HTMLElement,
  videoId: string,
  snapshot: { job_id: string; stage: string; progress: number },
  handles: PollHandle[],
): void {
  const tracker = new ProgressTracker();
  const fill = document.createElement("div");
  fill.className = "progress-fill";
  const track = document.createElement("div");
  track.className = "progress-track";
  track.append(fill);
  const label = document.createElement("span");
  label.className = "progress-label";
  status.append(track, label);

  const paint = (stage: string, progress: number) => {
    const shown = tracker.update(progress);
    fill.style.width = formatPercent(shown);
    fill.setAttribute("aria-valuenow", shown.toFixed(4));
    label.textContent = `${stageLabel(stage)} ${formatPercent(shown)}`;
  };
  paint(snapshot.stage, snapshot.progress);

  const handle = pollJob(snapshot.job_id, (job) => {
    if (job.stage === "done") {
      renderShowResult(status, videoId, true);
    } else if (job.stage === "failed") {
      renderFailure(status, job);
    } else {
      paint(job.stage, job.progress);
    }
  });
  handles.push(handle);
  handle.done.catch(() => {
    label.textContent = "Lost contact with the job.";
  });
}
