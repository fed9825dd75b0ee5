// View state: the single mutable store behind the panels. Event-stream
// messages are applied in arrival order; metric series are append-only.
export function initialState() {
    return {
        sessionId: null,
        phase: "idle",
        epoch: 0,
        lambda: 1.0,
        fault: null,
        dataset: null,
        grid: null,
        current: [],
        lastLosses: null,
        annotations: [],
        experiments: [],
        visibleExperiments: new Set(),
        draft: null,
        selectedIndex: null,
        streamConnected: false,
        notice: null,
    };
}
export function applyEvent(state, event) {
    if (event.session_id !== state.sessionId)
        return;
    switch (event.kind) {
        case "epoch_metrics": {
            if (event.epoch > state.epoch || state.current.length === 0) {
                state.epoch = event.epoch;
                state.current.push({
                    epoch: event.epoch,
                    accuracy: event.payload.test_accuracy,
                });
                state.lastLosses = event.payload.losses;
            }
            break;
        }
        case "grid_snapshot":
            state.grid = event.payload;
            break;
        case "phase_change":
            state.phase = event.payload.phase;
            break;
        case "fault":
            state.phase = "faulted";
            state.fault = event.payload.diagnostic;
            break;
    }
}
/** Merge a state fetch (pagination from the last seen epoch) after a
 * stream reconnect; never duplicates an epoch already charted. */
export function applyStateFetch(state, payload) {
    state.phase = payload.phase;
    state.lambda = payload.lambda;
    state.fault = payload.fault;
    state.annotations = payload.annotations;
    for (const entry of payload.history) {
        if (entry.epoch > state.epoch || state.current.length === 0) {
            state.epoch = entry.epoch;
            state.current.push({ epoch: entry.epoch, accuracy: entry.test_accuracy });
            state.lastLosses = entry.losses;
        }
    }
    if (payload.epoch > state.epoch)
        state.epoch = payload.epoch;
}
export function lastChartedEpoch(state) {
    return state.current.length ? state.current[state.current.length - 1].epoch : 0;
}
