#pragma once

// Multi-process worker mode. Each sub-simulation runs in a child `nbll worker`
// process; the task, the frozen global counters and the result travel through
// JSON files in a scratch directory.

#include <optional>
#include <string>

#include "nbll/parallel.hpp"

namespace nbll::cli {

struct TaskFile {
  WorkerTask task;
  Scenario scenario;
  std::optional<int> hop_bound;

  std::string to_json() const;
  static TaskFile from_json(const std::string& text);
};

WorkerRunner process_runner(std::optional<int> hop_bound);

/// Body of the `worker` subcommand.
int run_worker_files(const std::string& task_path, const std::string& counters_path, const std::string& out_path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace nbll::cli
