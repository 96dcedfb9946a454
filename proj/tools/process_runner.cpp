#include "process_runner.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "nbll/errors.hpp"

extern char** environ;

namespace nbll::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError("cannot write " + path);
}

std::string TaskFile::to_json() const {
  const SimConfig& c = task.config;
  json doc;
  doc["format"] = "nbll-worker-task";
  doc["round"] = task.round;
  doc["worker"] = task.worker;
  doc["topology"] = json::parse(scenario.topology.to_json());
  doc["loads"] = scenario.traffic.load;
  doc["hop_bound"] = hop_bound ? json(*hop_bound) : json();
  doc["config"] = {{"seed", c.seed},     {"num_events", c.num_events}, {"policy", c.policy.name()},
                   {"alpha", c.alpha},   {"window", c.window},         {"histogram_tail", c.histogram_tail},
                   {"audit", c.audit}};
  return doc.dump() + "\n";
}

TaskFile TaskFile::from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "nbll-worker-task") throw ConfigError("not a worker task file");
    TaskFile t{{}, Scenario{Topology::from_json(doc.at("topology").dump()), {}}, std::nullopt};
    t.task.round = doc.at("round").get<std::uint32_t>();
    t.task.worker = doc.at("worker").get<std::uint32_t>();
    t.scenario.traffic.load = doc.at("loads").get<std::vector<double>>();
    if (!doc.at("hop_bound").is_null()) t.hop_bound = doc["hop_bound"].get<int>();
    const json& c = doc.at("config");
    SimConfig& cfg = t.task.config;
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.num_events = c.at("num_events").get<std::uint64_t>();
    cfg.policy = Policy::parse(c.at("policy").get<std::string>());
    cfg.alpha = c.at("alpha").get<double>();
    cfg.window = c.at("window").get<std::uint64_t>();
    cfg.histogram_tail = c.at("histogram_tail").get<std::uint64_t>();
    cfg.audit = c.at("audit").get<bool>();
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed worker task: ") + e.what());
  }
}

int run_worker_files(const std::string& task_path, const std::string& counters_path, const std::string& out_path) {
  const TaskFile t = TaskFile::from_json(read_file(task_path));
  const BayesCounters global = BayesCounters::load(counters_path);
  const RouteCatalog catalog = enumerate_routes(t.scenario.topology, t.hop_bound);
  const WorkerResult r = run_worker(t.task, global, t.scenario, catalog);
  const std::string tmp = out_path + ".part";
  write_file(tmp, r.to_json());
  fs::rename(tmp, out_path);
  return 0;
}

namespace {

std::string self_exe() { return fs::read_symlink("/proc/self/exe").string(); }

int spawn_and_wait(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = 0;
  if (posix_spawn(&pid, argv[0], nullptr, nullptr, argv.data(), environ) != 0)
    throw ConfigError("cannot start worker process " + args[0]);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw ConfigError("lost worker process");
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

}  // namespace

WorkerRunner process_runner(std::optional<int> hop_bound) {
  return [hop_bound](const WorkerTask& task, const BayesCounters& global, const Scenario& scenario,
                     const RouteCatalog&) {
    static std::atomic<unsigned> serial{0};
    const fs::path dir = fs::temp_directory_path() / ("nbll-" + std::to_string(getpid()) + "-" +
                                                      std::to_string(serial++));
    fs::create_directories(dir);
    const std::string task_path = (dir / "task.json").string();
    const std::string counters_path = (dir / "global.json").string();
    const std::string out_path = (dir / "result.json").string();
    write_file(task_path, TaskFile{task, scenario, hop_bound}.to_json());
    global.save(counters_path);

    const int code = spawn_and_wait({self_exe(), "worker", "--task", task_path, "--counters", counters_path,
                                     "--out", out_path});
    if (code != 0 || !fs::exists(out_path)) {
      fs::remove_all(dir);
      throw ConfigError("worker process exited with status " + std::to_string(code));
    }
    WorkerResult r = WorkerResult::from_json(read_file(out_path));
    fs::remove_all(dir);
    if (r.round != task.round || r.worker != task.worker) throw ConfigError("worker result is for another task");
    return r;
  };
}

}  // namespace nbll::cli
