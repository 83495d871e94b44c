#pragma once

namespace promptseg {

/// Routes log output to stderr at the level named by PROMPTSEG_LOG
/// (trace, debug, info, warn, error, off; default warn).
void init_logging();

} // namespace promptseg
