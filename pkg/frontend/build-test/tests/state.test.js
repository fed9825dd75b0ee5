import assert from "node:assert/strict";
import { test } from "node:test";
import { applyEvent, applyStateFetch, initialState, lastChartedEpoch } from "../src/state.js";
function metricsEvent(epoch, accuracy, sid = "abc") {
    return {
        format: "steergrad/event",
        version: 1,
        kind: "epoch_metrics",
        session_id: sid,
        epoch,
        payload: {
            losses: { bce: 0.1, direction: 0.0, total: 0.1, n_examples: 9, n_annotations: 0 },
            train_accuracy: 1.0,
            test_accuracy: accuracy,
        },
    };
}
test("metric events append in arrival order", () => {
    const state = initialState();
    state.sessionId = "abc";
    applyEvent(state, metricsEvent(1, 0.5));
    applyEvent(state, metricsEvent(2, 0.6));
    applyEvent(state, metricsEvent(3, 0.7));
    assert.deepEqual(state.current.map((p) => p.epoch), [1, 2, 3]);
    assert.equal(state.epoch, 3);
    assert.equal(lastChartedEpoch(state), 3);
});
test("events for another session are ignored", () => {
    const state = initialState();
    state.sessionId = "abc";
    applyEvent(state, metricsEvent(1, 0.5, "other"));
    assert.equal(state.current.length, 0);
});
test("phase change and fault events update the badge state", () => {
    const state = initialState();
    state.sessionId = "abc";
    applyEvent(state, {
        format: "steergrad/event",
        version: 1,
        kind: "phase_change",
        session_id: "abc",
        epoch: 0,
        payload: { phase: "running", previous: "idle" },
    });
    assert.equal(state.phase, "running");
    applyEvent(state, {
        format: "steergrad/event",
        version: 1,
        kind: "fault",
        session_id: "abc",
        epoch: 4,
        payload: { diagnostic: "non-finite loss" },
    });
    assert.equal(state.phase, "faulted");
    assert.equal(state.fault, "non-finite loss");
});
test("state fetch after a reconnect never duplicates epochs", () => {
    const state = initialState();
    state.sessionId = "abc";
    applyEvent(state, metricsEvent(1, 0.5));
    applyEvent(state, metricsEvent(2, 0.6));
    const fetchPayload = {
        session_id: "abc",
        phase: "running",
        epoch: 4,
        lambda: 1.0,
        steepness: 20.0,
        fault: null,
        config: {},
        history: [2, 3, 4].map((epoch) => ({
            epoch,
            losses: { bce: 0.1, direction: 0, total: 0.1, n_examples: 9, n_annotations: 0 },
            train_accuracy: 1.0,
            test_accuracy: 0.5 + epoch / 10,
        })),
        annotations: [],
    };
    applyStateFetch(state, fetchPayload);
    assert.deepEqual(state.current.map((p) => p.epoch), [1, 2, 3, 4]);
    assert.equal(state.epoch, 4);
});
