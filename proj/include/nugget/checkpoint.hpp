#pragma once

#include <filesystem>

#include "nugget/model.hpp"

namespace nugget {

inline constexpr int kCheckpointFormatVersion = 1;

/// JSON lines: a header {"format","version","config","arrays":[{name,shape}]}
/// followed by one {"name","shape","values"} record per parameter array.
void save_checkpoint(const NuggetParams& params, const std::filesystem::path& path);

/// Throws VersionError, MalformedRecordError (with line number) or IoError.
/// Array names and shapes must match the layout implied by the stored config.
NuggetParams load_checkpoint(const std::filesystem::path& path);

}  // namespace nugget
