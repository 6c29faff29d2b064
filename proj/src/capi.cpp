// placeholder, replaced by the full C API
extern "C" const char* cscx_version(void) { return "0.1.0"; }
