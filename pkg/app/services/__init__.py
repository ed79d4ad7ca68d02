# Services package: one computation service per module, each with a global instance
