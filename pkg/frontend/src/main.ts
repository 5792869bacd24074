import { renderUploadPage } from "./upload";
import { renderVideoPage } from "./video";
import { renderVideoList } from "./videos";
import "./styles.css";

type Cleanup = () => void;
let teardown: Cleanup | null = null;

function route(): void {
  const container = document.getElementById("app");
  if (!container) return;
  teardown?.();
  const videoMatch = window.location.hash.match(/^#\/video\/(.+)$/);
  if (videoMatch) {
    teardown = renderVideoPage(container, decodeURIComponent(videoMatch[1]));
  } else if (window.location.hash === "#/upload") {
    teardown = renderUploadPage(container);
  } else {
    teardown = renderVideoList(container);
  }
}

window.addEventListener("hashchange", route);
route();
