use tpc_harq::analysis::{sas_throughput, PerCurve, SasInputs};
use tpc_harq::channel::{ChannelKind, ChannelModel};
use tpc_harq::codec::{ComponentCode, CrcSpec, DecoderMode, Detection, HarqConfig};
use tpc_harq::harq::{measure_single_shot_per, monte_carlo, packet_payload, run_session, PerTable};

#[test]
fn every_code_size_survives_a_clean_channel() {
    for m in 3..=7 {
        let code = ComponentCode::new(m).unwrap();
        let detection = if m == 3 { Detection::Perfect } else { Detection::Crc(CrcSpec::CRC16_8005) };
        for decoder in [DecoderMode::Hiho, DecoderMode::Siso] {
            let cfg = HarqConfig::new(code.clone(), detection.clone()).with_decoder(decoder);
            let model = ChannelModel::awgn(30.0, cfg.rate());
            let info = packet_payload(&cfg, 3, 0);
            let out = run_session(&cfg, &model, &info, 3, 0).unwrap();
            assert_eq!(out.packet_rounds(), 1, "m = {m}, {decoder:?}");
            assert!(!out.subpackets[0].rounds[0].actual_error);
        }
    }
}

#[test]
fn per_table_round_trips_through_csv() {
    let cfg = HarqConfig::new(ComponentCode::new(3).unwrap(), Detection::Perfect).with_decoder(DecoderMode::Hiho);
    let table = measure_single_shot_per(&cfg, &ChannelModel::awgn(0.0, cfg.rate()), &[0.0, 2.0, 4.0], 200, 5).unwrap();
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"snr_db,round,per,trials\n"));
    let back = PerTable::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, table);
}

#[test]
fn sas_tracks_simulation_on_a_small_code() {
    let cfg = HarqConfig::new(ComponentCode::new(3).unwrap(), Detection::Perfect).with_decoder(DecoderMode::Hiho);
    let grid: Vec<f64> = (0..=30).map(|i| i as f64 * 0.5).collect();
    let table = measure_single_shot_per(&cfg, &ChannelModel::awgn(0.0, cfg.rate()), &grid, 2000, 11).unwrap();
    let inputs = SasInputs::new(PerCurve::from_table(&table).unwrap(), 4, cfg.kappa(), cfg.subpacket_bits(), ChannelKind::Awgn).unwrap();
    for snr in [1.0, 3.0, 5.0] {
        let mc = monte_carlo(&cfg, &ChannelModel::awgn(snr, cfg.rate()), 2000, 12).unwrap().throughput();
        let sas = sas_throughput(&inputs, snr).unwrap();
        assert!((mc - sas).abs() < 0.05, "{snr} dB: MC {mc}, SAS {sas}");
    }
}
