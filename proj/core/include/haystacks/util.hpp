#pragma once

#include <functional>
#include <string>

namespace haystacks {

// Write-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Runs fn(0..n-1) across up to `workers` threads. Callers are
// responsible for making per-index work independent; results should be
// written to pre-sized slots so ordering stays deterministic.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace haystacks
