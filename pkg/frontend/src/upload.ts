// Upload page: required fields are validated client-side, the POST creates
// the video and queues its processing job, and on success we land back on
// the video list where the job's live progress is shown.

import { ApiError, uploadVideo } from "./api";

export function renderUploadPage(container: HTMLElement): () => void {
  container.innerHTML = `
    <section class="upload-page">
      <a class="back-link" href="#/">Back to videos</a>
      <h2>Upload video</h2>
      <form id="upload-form" novalidate>
        <label>Video file
          <input type="file" name="file" accept="video/*" required />
        </label>
        <label>Title
          <input type="text" name="title" required placeholder="Give the video a title" />
        </label>
        <label>Description
          <textarea name="description" rows="3"></textarea>
        </label>
        <label>Author
          <input type="text" name="author" />
        </label>
        <label>Thumbnail (optional)
          <input type="file" name="thumbnail" accept="image/*" />
        </label>
        <div class="form-error" hidden></div>
        <button type="submit" disabled>Upload</button>
      </form>
    </section>
  `;

  const form = container.querySelector<HTMLFormElement>("#upload-form")!;
  const fileInput = form.querySelector<HTMLInputElement>('input[name="file"]')!;
  const titleInput = form.querySelector<HTMLInputElement>('input[name="title"]')!;
  const thumbInput = form.querySelector<HTMLInputElement>('input[name="thumbnail"]')!;
  const descInput = form.querySelector<HTMLTextAreaElement>('textarea[name="description"]')!;
  const authorInput = form.querySelector<HTMLInputElement>('input[name="author"]')!;
  const errorBox = form.querySelector<HTMLElement>(".form-error")!;
  const submit = form.querySelector<HTMLButtonElement>('button[type="submit"]')!;

  const revalidate = () => {
    const hasFile = (fileInput.files?.length ?? 0) > 0;
    submit.disabled = !hasFile || titleInput.value.trim() === "";
  };
  fileInput.addEventListener("change", revalidate);
  titleInput.addEventListener("input", revalidate);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const file = fileInput.files?.[0];
    const title = titleInput.value.trim();
    if (!file || title === "") return;

    submit.disabled = true;
    submit.textContent = "Uploading...";
    errorBox.hidden = true;
    uploadVideo({
      file,
      title,
      description: descInput.value,
      author: authorInput.value,
      thumbnail: thumbInput.files?.[0] ?? null,
    })
      .then(() => {
        window.location.hash = "#/";
      })
      .catch((error: unknown) => {
        errorBox.textContent =
          error instanceof ApiError
            ? `Upload rejected: ${error.message}`
            : "Upload failed; is the service running?";
        errorBox.hidden = false;
        submit.textContent = "Upload";
        revalidate();
      });
  });

  return () => {};
}
