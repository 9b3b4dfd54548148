import { ApiError, GatewayClient } from "../api.js";
import { errorText, esc } from "../dom.js";
import type { Location, Tour, TourStop } from "../types.js";

interface EditorCallbacks {
  onSaved: () => void;
  onClose: () => void;
}

function banner(root: HTMLElement, text: string): void {
  const slot = root.querySelector<HTMLElement>(".editor-error");
  if (!slot) return;
  slot.textContent = text;
  slot.hidden = text === "";
}

function fieldError(root: HTMLElement, selector: string, text: string): void {
  const slot = root.querySelector<HTMLElement>(selector);
  if (!slot) return;
  slot.textContent = text;
  slot.hidden = text === "";
}

/**
 * Modal form for creating or editing a tour. Editing exposes the full stop
 * list with reordering and per-stop speech overrides; creation picks stop
 * locations only, overrides come later via edit.
 */
export function openTourEditor(
  root: HTMLElement,
  client: GatewayClient,
  tour: Tour | null,
  locations: Location[],
  callbacks: EditorCallbacks,
): void {
  const creating = tour === null;
  const draft: { name: string; tour_type: string; expected_duration: string; stops: TourStop[] } = {
    name: tour?.name ?? "",
    tour_type: tour?.tour_type ?? "",
    expected_duration: String(tour?.expected_duration ?? 600),
    stops: (tour?.stops ?? []).map((s) => ({ ...s })),
  };

  const locationOptions = () =>
    locations.map((l) => `<option value="${esc(l.id)}">${esc(l.name)}</option>`).join("");

  function readForm(): void {
    draft.name = root.querySelector<HTMLInputElement>(".tour-name-input")?.value ?? draft.name;
    draft.tour_type = root.querySelector<HTMLInputElement>(".tour-type-input")?.value ?? "";
    draft.expected_duration =
      root.querySelector<HTMLInputElement>(".tour-duration-input")?.value ?? "";
    root.querySelectorAll<HTMLElement>(".stop-editor").forEach((row, index) => {
      const stop = draft.stops[index];
      if (!stop) return;
      stop.location_id = row.querySelector<HTMLSelectElement>(".stop-location")!.value;
      if (!creating) {
        const override = row.querySelector<HTMLInputElement>(".stop-override")!.value;
        stop.speech_override = override === "" ? null : override;
      }
    });
  }

  function render(): void {
    root.innerHTML = `
      <div class="modal">
        <h3>${creating ? "New tour" : `Edit "${esc(tour!.name)}"`}</h3>
        <p class="editor-error field-error" hidden></p>
        <label>Name <input class="tour-name-input" type="text" value="${esc(draft.name)}"></label>
        <span class="field-error tour-name-error" hidden></span>
        <label>Type <input class="tour-type-input" type="text" value="${esc(draft.tour_type)}"
                           placeholder="exhibition, lab, ..."></label>
        <label>Expected duration (s)
          <input class="tour-duration-input" type="number" min="1" value="${esc(draft.expected_duration)}">
        </label>
        <span class="field-error tour-duration-error" hidden></span>
        <h4>Stops</h4>
        <ol class="stop-editors">
          ${draft.stops
            .map(
              (s, i) => `
            <li class="stop-editor" data-index="${i}">
              <select class="stop-location">${locationOptions()}</select>
              ${
                creating
                  ? ""
                  : `<input class="stop-override" type="text"
                       placeholder="speech override (blank = location description)"
                       value="${esc(s.speech_override ?? "")}">`
              }
              <button class="stop-up" type="button" ${i === 0 ? "disabled" : ""}>↑</button>
              <button class="stop-down" type="button" ${i === draft.stops.length - 1 ? "disabled" : ""}>↓</button>
              <button class="stop-remove" type="button">✕</button>
            </li>`,
            )
            .join("")}
        </ol>
        <button class="stop-add" type="button">Add stop</button>
        <div class="modal-actions">
          <button class="editor-save">Save</button>
          <button class="editor-cancel" type="button">Cancel</button>
        </div>
      </div>
    `;

    root.querySelectorAll<HTMLElement>(".stop-editor").forEach((row) => {
      const index = Number(row.dataset.index);
      // set selection as a property: more reliable than a selected attribute
      // when many selects are parsed from one template
      row.querySelector<HTMLSelectElement>(".stop-location")!.value = draft.stops[index].location_id;
      row.querySelector(".stop-up")?.addEventListener("click", () => {
        readForm();
        [draft.stops[index - 1], draft.stops[index]] = [draft.stops[index], draft.stops[index - 1]];
        render();
      });
      row.querySelector(".stop-down")?.addEventListener("click", () => {
        readForm();
        [draft.stops[index], draft.stops[index + 1]] = [draft.stops[index + 1], draft.stops[index]];
        render();
      });
      row.querySelector(".stop-remove")?.addEventListener("click", () => {
        readForm();
        draft.stops.splice(index, 1);
        render();
      });
    });
    root.querySelector(".stop-add")?.addEventListener("click", () => {
      readForm();
      const first = locations[0];
      if (!first) return;
      draft.stops.push({ location_id: first.id, speech_override: null });
      render();
    });
    root.querySelector(".editor-save")?.addEventListener("click", () => {
      void save();
    });
    root.querySelector(".editor-cancel")?.addEventListener("click", callbacks.onClose);
  }

  async function save(): Promise<void> {
    readForm();
    banner(root, "");
    fieldError(root, ".tour-name-error", "");
    fieldError(root, ".tour-duration-error", "");
    // validate locally so an obviously bad form never leaves the browser
    if (!draft.name.trim()) {
      fieldError(root, ".tour-name-error", "name is required");
      return;
    }
    const duration = Number(draft.expected_duration);
    if (!Number.isFinite(duration) || duration <= 0) {
      fieldError(root, ".tour-duration-error", "duration must be a positive number of seconds");
      return;
    }
    try {
      if (creating) {
        await client.createTour({
          name: draft.name.trim(),
          tour_type: draft.tour_type.trim(),
          stop_location_ids: draft.stops.map((s) => s.location_id),
          expected_duration: duration,
        });
      } else {
        await client.editTour(tour!.id, {
          name: draft.name.trim(),
          tour_type: draft.tour_type.trim(),
          expected_duration: duration,
          stops: draft.stops.map((s) => ({
            location_id: s.location_id,
            speech_override: s.speech_override,
          })),
        });
      }
      callbacks.onSaved();
    } catch (err) {
      // leave the form as typed; a name clash is fixed by editing one field
      banner(root, err instanceof ApiError ? err.message : errorText(err));
    }
  }

  render();
}

/** Modal form for renaming a location, moving it, or rewording its description. */
export function openLocationEditor(
  root: HTMLElement,
  client: GatewayClient,
  location: Location,
  callbacks: EditorCallbacks,
): void {
  root.innerHTML = `
    <div class="modal">
      <h3>Edit "${esc(location.name)}"</h3>
      <p class="editor-error field-error" hidden></p>
      <label>Name <input class="loc-name-input" type="text" value="${esc(location.name)}"></label>
      <span class="field-error loc-name-error" hidden></span>
      <label>Description
        <textarea class="loc-desc-input" rows="3">${esc(location.description)}</textarea>
      </label>
      <fieldset class="pose-inputs">
        <legend>Pose</legend>
        <label>x <input class="loc-x" type="number" step="0.01" value="${location.pose.x}"></label>
        <label>y <input class="loc-y" type="number" step="0.01" value="${location.pose.y}"></label>
        <label>heading <input class="loc-theta" type="number" step="0.01" value="${location.pose.theta}"></label>
      </fieldset>
      <span class="field-error loc-pose-error" hidden></span>
      <div class="modal-actions">
        <button class="editor-save">Save</button>
        <button class="editor-cancel" type="button">Cancel</button>
      </div>
    </div>
  `;

  async function save(): Promise<void> {
    banner(root, "");
    fieldError(root, ".loc-name-error", "");
    fieldError(root, ".loc-pose-error", "");
    const name = root.querySelector<HTMLInputElement>(".loc-name-input")!.value.trim();
    if (!name) {
      fieldError(root, ".loc-name-error", "name is required");
      return;
    }
    const coords = ["x", "y", "theta"].map((axis) =>
      Number(root.querySelector<HTMLInputElement>(`.loc-${axis === "theta" ? "theta" : axis}`)!.value),
    );
    if (coords.some((v) => !Number.isFinite(v))) {
      fieldError(root, ".loc-pose-error", "pose values must be numbers");
      return;
    }
    const [x, y, theta] = coords;
    try {
      await client.editLocation(location.id, {
        name,
        description: root.querySelector<HTMLTextAreaElement>(".loc-desc-input")!.value,
        pose: { x, y, theta },
      });
      callbacks.onSaved();
    } catch (err) {
      banner(root, err instanceof ApiError ? err.message : errorText(err));
    }
  }

  root.querySelector(".editor-save")?.addEventListener("click", () => {
    void save();
  });
  root.querySelector(".editor-cancel")?.addEventListener("click", callbacks.onClose);
}
