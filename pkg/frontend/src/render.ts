/** Pure view functions: UiSessionState in, HTML string out.
 *
 * Rendering never invents data; every symptom and disease string comes from an
 * API response carried in the transcript. Chip answered/disabled state is
 * derived from the transcript too, so replaying its events re-renders an
 * identical view.
 */

import type { MatchView, RankedView, SuggestionView, DetailView } from "./api.js";
import type { ChatEvent, UiSessionState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

function answersByChip(events: readonly ChatEvent[]): Map<string, string> {
  const answers = new Map<string, string>();
  for (const event of events) {
    if (event.kind === "answer") {
      answers.set(event.symptomId, event.answer);
    }
  }
  return answers;
}

function renderMatchFeedback(match: MatchView): string {
  if (match.matched !== null) {
    return (
      `<div class="msg bot match">Matched ` +
      `<strong>${escapeHtml(match.matched_representative ?? match.matched)}</strong>` +
      ` (similarity ${match.similarity.toFixed(3)})</div>`
    );
  }
  const hints = match.alternatives
    .map((alt) => `${escapeHtml(alt.representative)} (${alt.similarity.toFixed(3)})`)
    .join(", ");
  const suffix = hints ? ` Did you mean: ${hints}?` : "";
  return `<div class="msg bot no-match">Not recognized: “${escapeHtml(match.text)}”.${suffix}</div>`;
}

function renderChips(
  suggestions: SuggestionView[],
  answers: Map<string, string>,
  interactive: boolean,
): string {
  const chips = suggestions
    .map((s) => {
      const answer = answers.get(s.symptom_id);
      const answered = answer !== undefined;
      const disabled = answered || !interactive ? " disabled" : "";
      const cls = answered ? ` answered-${answer}` : "";
      return (
        `<span class="chip${cls}" data-symptom="${escapeHtml(s.symptom_id)}">` +
        `<span class="chip-label">${escapeHtml(s.representative)}</span>` +
        `<span class="chip-count">${s.count}</span>` +
        `<button type="button" class="chip-yes" data-symptom="${escapeHtml(s.symptom_id)}" data-answer="yes"${disabled}>yes</button>` +
        `<button type="button" class="chip-no" data-symptom="${escapeHtml(s.symptom_id)}" data-answer="no"${disabled}>no</button>` +
        `</span>`
      );
    })
    .join("");
  return `<div class="msg bot suggestions"><p>Do any of these also apply?</p><div class="chips">${chips}</div></div>`;
}

function renderRankingTable(ranking: RankedView[]): string {
  const rows = ranking
    .map((r) => {
      const note = r.zero_score ? ` <span class="zero-note">no symptom overlap</span>` : "";
      return (
        `<tr class="rank-row" data-rank="${r.rank}">` +
        `<td class="rank">${r.rank}</td>` +
        `<td class="disease">${escapeHtml(r.name)}${note}</td>` +
        `<td class="score">${r.score.toFixed(3)}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<div class="msg bot ranking"><p>Top ${ranking.length} diseases (click a row for details):</p>` +
    `<table class="ranking-table"><thead><tr><th>#</th><th>disease</th><th>score</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></div>`
  );
}

function renderDetailCard(detail: DetailView): string {
  const symptoms = detail.symptoms.map((s) => `<li>${escapeHtml(s)}</li>`).join("");
  const treatment = detail.treatment
    ? escapeHtml(detail.treatment)
    : "<em>none listed</em>";
  return (
    `<div class="msg bot detail-card">` +
    `<h3>${escapeHtml(detail.name)}</h3>` +
    `<p class="description">${escapeHtml(detail.description)}</p>` +
    `<p class="symptoms-title">Symptoms</p><ul class="symptoms">${symptoms}</ul>` +
    `<p class="treatment"><strong>Treatment:</strong> ${treatment}</p>` +
    `</div>`
  );
}

export function renderEvent(
  event: ChatEvent,
  answers: Map<string, string>,
  interactive: boolean,
): string {
  switch (event.kind) {
    case "user_text":
      return `<div class="msg user">${escapeHtml(event.text)}</div>`;
    case "match_feedback":
      return renderMatchFeedback(event.match);
    case "suggestion_prompt":
      return renderChips(event.suggestions, answers, interactive);
    case "answer":
      return (
        `<div class="msg user answer">${escapeHtml(event.representative)}: ` +
        `${event.answer === "yes" ? "yes" : "no"}</div>`
      );
    case "info":
      return `<div class="msg bot info">${escapeHtml(event.text)}</div>`;
    case "ranking":
      return renderRankingTable(event.ranking);
    case "detail":
      return renderDetailCard(event.detail);
    case "error":
      return (
        `<div class="msg bot error">${escapeHtml(event.message)}` +
        (event.retryable
          ? ` <button type="button" class="retry" data-retry="1">retry</button>`
          : "") +
        `</div>`
      );
  }
}

export function renderTranscript(state: UiSessionState): string {
  const answers = answersByChip(state.transcript);
  const interactive = state.phase === "collecting" && !state.busy;
  return state.transcript
    .map((event) => renderEvent(event, answers, interactive))
    .join("\n");
}

export function renderComposer(state: UiSessionState): string {
  const collecting = state.phase === "collecting";
  const inputDisabled = !collecting || state.busy ? " disabled" : "";
  const doneDisabled =
    !collecting || state.busy || state.confirmedCount === 0 ? " disabled" : "";
  return (
    `<form id="composer" autocomplete="off">` +
    `<input id="symptom-input" type="text" ` +
    `placeholder="Describe your symptoms, e.g. fever, rash"${inputDisabled}>` +
    `<button type="submit" id="send"${inputDisabled}>send</button>` +
    `<button type="button" id="done"${doneDisabled}>I’m done</button>` +
    `</form>`
  );
}

export function renderApp(state: UiSessionState): string {
  return (
    `<div class="chat">` +
    `<div class="transcript" id="transcript">${renderTranscript(state)}</div>` +
    `${renderComposer(state)}` +
    `</div>`
  );
}
