#ifndef LFR_SERVICE_H_
#define LFR_SERVICE_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "lfr/disparity.h"
#include "lfr/light_field.h"

namespace lfr {

enum class JobState { kQueued, kRunning, kDone, kFailed };

const char* to_string(JobState state);

struct RenderRequest {
  double df = 0.0;
  double k = 2.0;
  int scale = 2;
  int noi = 10;
  double lambda_b = 5.0;
  double lambda_btv = 0.2;
  double step = 0.1;
  double a = 15.0;
  double b = 0.3;
};

struct RenderJob {
  std::string id;
  JobState state = JobState::kQueued;
  RenderRequest params;
  int progress = 0;  // completed SR iterations, <= params.noi
  std::optional<std::filesystem::path> result_path;
  std::optional<std::string> error;
};

struct ServiceOptions {
  std::filesystem::path dataset_dir;
  // Loaded instead of running the plane sweep when set.
  std::optional<std::filesystem::path> disparity_path;
  // Sweep settings; the range is replaced by meta.json's disparity_range
  // when the dataset provides one.
  DisparityEstimationParams estimation;
  // Where render results are written. Defaults to a fresh directory under
  // the system temp path; the dataset directory is never written.
  std::optional<std::filesystem::path> job_dir;
};

// Local HTTP front end for interactive refocusing:
//   GET  /dataset/info          {rows, cols, width, height, disparity_range}
//   GET  /dataset/center.png    reference view
//   GET  /disparity/value?x=&y= {d}
//   POST /refocus/preview       {df, k, a, b} -> PNG, bokeh only
//   POST /refocus/render        RenderRequest fields -> {job_id}
//   GET  /job/{id}              RenderJob as JSON
//   GET  /job/{id}/result.png   once the job is done
// The dataset and disparity are loaded once in the constructor. Render jobs
// run one at a time on a worker thread in submission order.
class RefocusService {
 public:
  explicit RefocusService(ServiceOptions options);
  ~RefocusService();

  RefocusService(const RefocusService&) = delete;
  RefocusService& operator=(const RefocusService&) = delete;

  // Binds and serves on a background thread. port 0 picks a free port.
  // Returns the bound port; throws std::runtime_error if binding fails.
  int start(const std::string& host, int port);
  // Blocks until stop() is called.
  void wait();
  void stop();

  const LightField& light_field() const;
  const DisparityMap& disparity() const;

  std::string submit(const RenderRequest& request);
  std::optional<RenderJob> job(const std::string& id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lfr

#endif  // LFR_SERVICE_H_
