// Server-sent event reader over fetch streaming, usable in both the
// browser and node (EventSource is browser-only and can't be shared
// with the headless tests).
export function subscribe(base, sessionId, onEvent, onEnd) {
    const controller = new AbortController();
    const done = (async () => {
        const response = await fetch(`${base}/api/sessions/${sessionId}/events`, {
            signal: controller.signal,
            headers: { accept: "text/event-stream" },
        });
        if (!response.ok || !response.body) {
            throw new Error(`subscription refused: ${response.status}`);
        }
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
            const { done: finished, value } = await reader.read();
            if (finished)
                break;
            buffer += decoder.decode(value, { stream: true });
            let cut;
            while ((cut = buffer.indexOf("\n\n")) >= 0) {
                const frame = buffer.slice(0, cut);
                buffer = buffer.slice(cut + 2);
                for (const line of frame.split("\n")) {
                    if (line.startsWith("data: ")) {
                        onEvent(JSON.parse(line.slice(6)));
                    }
                    // lines starting with ":" are keepalive comments
                }
            }
        }
    })();
    done.then(() => onEnd?.(), (error) => {
        if (!controller.signal.aborted)
            onEnd?.(error);
    });
    return { close: () => controller.abort(), done: done.catch(() => undefined) };
}
