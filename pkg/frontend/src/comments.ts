// Comment forest rendering.  The tree mirrors the API response exactly:
// same root order, same nesting, nothing reordered client-side.

import { ApiError, postReply } from "./api";
import { avatarDataUri } from "./avatar";
import type { CommentNode, ReplyResult } from "./types";

export interface CommentViewOptions {
  /** A mutating call returned 409: a job holds the video, go wait for it. */
  onConflict(): void;
  onError(message: string): void;
}

export class CommentView {
  private nodes = new Map<string, CommentNode>();
  private childLists = new Map<string, HTMLElement>();

  constructor(
    private readonly container: HTMLElement,
    private readonly options: CommentViewOptions,
  ) {}

  render(roots: CommentNode[]): void {
    this.nodes.clear();
    this.childLists.clear();
    this.container.textContent = "";
    for (const root of roots) {
      this.container.append(this.renderNode(root));
    }
  }

  /** New root from the persona form goes on top, newest first. */
  prependRoot(node: CommentNode): void {
    this.container.prepend(this.renderNode(node));
  }

  private renderNode(node: CommentNode): HTMLElement {
    this.nodes.set(node.comment_id, node);

    const article = document.createElement("article");
    article.className = "comment";
    article.dataset.id = node.comment_id;
    article.dataset.kind = node.kind;

    const row = document.createElement("div");
    row.className = "comment-row";
    row.append(this.renderAvatar(node), this.renderMain(node));

    const children = document.createElement("div");
    children.className = "comment-children";
    this.childLists.set(node.comment_id, children);
    for (const child of node.children) {
      children.append(this.renderNode(child));
    }

    article.append(row, children);
    return article;
  }

  private renderAvatar(node: CommentNode): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "avatar-wrap";

    const img = document.createElement("img");
    img.className = "avatar";
    img.src = avatarDataUri(node.avatar_seed);
    img.alt = node.author_name;
    wrap.append(img);

    if (node.persona_text !== null) {
      const tip = document.createElement("div");
      tip.className = "persona-tip";
      tip.textContent = node.persona_text;
      wrap.append(tip);
      wrap.addEventListener("mouseenter", () => tip.classList.add("visible"));
      wrap.addEventListener("mouseleave", () => tip.classList.remove("visible"));
    }
    return wrap;
  }

  private renderMain(node: CommentNode): HTMLElement {
    const main = document.createElement("div");
    main.className = "comment-main";

    const head = document.createElement("div");
    head.className = "comment-head";
    const author = document.createElement("span");
    author.className = "author";
    author.textContent = node.author_name;
    const when = document.createElement("time");
    when.className = "when";
    when.textContent = node.created_at.replace("T", " ").replace("Z", "");
    head.append(author, when);

    const body = document.createElement("p");
    body.className = "comment-body";
    body.textContent = node.body;

    const actions = document.createElement("div");
    actions.className = "comment-actions";
    const toggle = document.createElement("button");
    toggle.type = "button";
    toggle.className = "reply-toggle";
    toggle.textContent = "Reply";
    actions.append(toggle);

    const form = this.renderReplyForm(node);
    toggle.addEventListener("click", () => {
      form.hidden = !form.hidden;
      if (!form.hidden) {
        form.querySelector("textarea")?.focus();
      }
    });

    main.append(head, body, actions, form);
    return main;
  }

  private renderReplyForm(node: CommentNode): HTMLFormElement {
    const form = document.createElement("form");
    form.className = "reply-form";
    form.hidden = true;

    const input = document.createElement("textarea");
    input.className = "reply-input";
    input.placeholder = "Write a reply";
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.className = "reply-submit";
    submit.textContent = "Post reply";
    submit.disabled = true;
    form.append(input, submit);

    input.addEventListener("input", () => {
      submit.disabled = input.value.trim() === "";
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitReply(node, input, submit);
    });
    return form;
  }

  private async submitReply(
    node: CommentNode,
    input: HTMLTextAreaElement,
    submit: HTMLButtonElement,
  ): Promise<void> {
    const body = input.value.trim();
    if (body === "" || submit.disabled) return;
    submit.disabled = true;
    try {
      const result = await postReply(node.comment_id, body);
      this.insertReplyNodes(node, result);
      input.value = "";
      input.closest("form")?.setAttribute("hidden", "");
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.options.onConflict();
      } else {
        this.options.onError(error instanceof Error ? error.message : String(error));
      }
    } finally {
      submit.disabled = input.value.trim() === "";
    }
  }

  /**
   * A reply round-trip yields exactly two nodes: the creator's reply under
   * the target, and a generated answer under that, written with the target
   * comment's persona.  The persona hover text is carried over from the
   * target node, which the API delivered with the forest.
   */
  private insertReplyNodes(target: CommentNode, result: ReplyResult): void {
    const generatedPersona =
      result.generated_comment.persona_id !== null &&
      result.generated_comment.persona_id === target.persona_id
        ? target.persona_text
        : null;
    const generated: CommentNode = {
      ...result.generated_comment,
      persona_text: generatedPersona,
      children: [],
    };
    const user: CommentNode = {
      ...result.user_comment,
      persona_text: null,
      children: [generated],
    };
    target.children.push(user);
    this.childLists.get(target.comment_id)?.append(this.renderNode(user));
  }
}
