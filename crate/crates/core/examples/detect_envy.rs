//! Find envious methods and show the access counts behind each verdict.

use psilite::envy::{access_profile, detect_feature_envy, findings_report, Counting, Format};
use psilite::model::build_model;
use psilite::syntax::parse_file;

const ORDER: &str = r#"class Order {
    Customer customer;
    int quantity;

    String label() {
        return customer.name + ", " + customer.street + ", " + customer.city + " x" + quantity;
    }

    int twice() {
        return quantity * 2;
    }
}
"#;

const CUSTOMER: &str = r#"class Customer {
    String name;
    String street;
    String city;
}
"#;

fn main() {
    let trees = vec![
        parse_file(ORDER, "/demo/Order.java"),
        parse_file(CUSTOMER, "/demo/Customer.java"),
    ];
    let model = build_model(trees, "/demo").unwrap();

    let order = model.class("Order").unwrap();
    for m in &order.methods {
        let p = access_profile(order, m, &model);
        println!(
            "{}: own {} {:?}",
            m.name,
            p.own_count(Counting::Distinct),
            p.foreign_counts(Counting::Distinct)
        );
    }

    let findings = detect_feature_envy(&model, Counting::Distinct);
    println!("{}", findings_report(&findings, Format::Table));
    println!("{}", findings_report(&findings, Format::Json));
}
