// Wire payloads exchanged with the training service.
export {};
