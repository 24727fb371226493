#pragma once

namespace vsq {

/// Exit codes: 0 success, 1 invalid input (usage, config, parameters, I/O),
/// 2 numerical failure (blow-up or an undefined measurement).
int cli_main(int argc, char** argv);

}  // namespace vsq
