// Client-side validation for the request form and delay dialog. Server
// validation is authoritative; this only catches the obvious cases before
// a round trip.

export interface RequestFormFields {
  id: string;
  origin: string;
  patients: string;
  kind: string;
}

export interface DelayFormFields {
  cause: string;
  minutes: string;
}

export type FieldErrors = Record<string, string>;

const KINDS = ["interisland_transfer", "point_of_injury"];

export function validateRequestForm(fields: RequestFormFields): FieldErrors {
  const errors: FieldErrors = {};
  if (!fields.id.trim()) errors["id"] = "request id is required";
  if (!fields.origin.trim()) errors["origin"] = "origin facility is required";
  const patients = Number(fields.patients);
  if (!Number.isInteger(patients) || patients < 1) {
    errors["patients"] = "patients must be a whole number of at least 1";
  }
  if (fields.kind && !KINDS.includes(fields.kind)) {
    errors["kind"] = `kind must be one of: ${KINDS.join(", ")}`;
  }
  return errors;
}

export function validateDelayForm(fields: DelayFormFields): FieldErrors {
  const errors: FieldErrors = {};
  if (!fields.cause.trim()) errors["cause"] = "a cause is required";
  const minutes = Number(fields.minutes);
  if (fields.minutes.trim() === "" || Number.isNaN(minutes) || minutes < 0) {
    errors["minutes"] = "minutes must be a non-negative number";
  }
  return errors;
}

/** Map a service error body onto the matching form field (or a banner). */
export function serverErrorToForm(body: {
  message: string;
  field?: string;
}): { fieldErrors: FieldErrors; banner: string | null } {
  if (body.field) {
    return { fieldErrors: { [body.field]: body.message }, banner: null };
  }
  return { fieldErrors: {}, banner: body.message };
}
